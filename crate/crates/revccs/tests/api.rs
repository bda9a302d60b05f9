use axum::body::{to_bytes, Body};
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use revccs::export::NetView;
use revccs::server::{router, Store};
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let request = Request::builder().method(method).uri(uri);
    let request = match body {
        Some(b) => request.header("content-type", "application/json").body(Body::from(b.to_string())),
        None => request.body(Body::empty()),
    }
    .unwrap();
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = to_bytes(response.into_body(), usize::MAX).await.unwrap();
    let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, value)
}

async fn create(app: &Router, term: &str) -> (String, Value) {
    let (status, body) = call(app, Method::POST, "/sessions", Some(json!({ "term": term }))).await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    (body["id"].as_str().unwrap().to_string(), body["state"].clone())
}

fn names(state: &Value) -> Vec<String> {
    state["enabled"].as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap().to_string()).collect()
}

#[tokio::test]
async fn prefix_session() {
    let app = router(Store::default());
    let (id, state) = create(&app, "a.0").await;
    assert_eq!(
        state,
        json!({
            "term": "a.0",
            "rccs": "<> |> a.0",
            "marking": ["a.0"],
            "enabled": [{ "name": "->a?", "direction": "fwd", "label": "a?" }],
            "history": [],
        })
    );
    let (status, fired) =
        call(&app, Method::POST, &format!("/sessions/{id}/fire"), Some(json!({ "transition": "->a?" }))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(fired["enabled"], json!([{ "name": "<-a?", "direction": "bwd", "label": "a?" }]));
    assert_eq!(fired["history"], json!(["->a?"]));
    let (_, shown) = call(&app, Method::GET, &format!("/sessions/{id}"), None).await;
    assert_eq!(shown, fired);
    let (status, undone) = call(&app, Method::POST, &format!("/sessions/{id}/undo"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(undone, state);
}

#[tokio::test]
async fn errors() {
    let app = router(Store::default());
    let (status, body) = call(&app, Method::POST, "/sessions", Some(json!({ "term": "a.(" }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(body["error"].as_str().unwrap().contains("parse error"));
    let (status, _) = call(&app, Method::POST, "/sessions", Some(json!({ "term": "rec X. X" }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = call(&app, Method::GET, "/sessions/99", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let (id, _) = create(&app, "a.0").await;
    let fire = format!("/sessions/{id}/fire");
    let (status, _) = call(&app, Method::POST, &fire, Some(json!({ "transition": "<-a?" }))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (status, _) = call(&app, Method::POST, &format!("/sessions/{id}/undo"), None).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (status, _) = call(&app, Method::GET, &format!("/sessions/{id}/net?radius=100"), None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let (status, _) = call(&app, Method::DELETE, &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::NO_CONTENT);
    let (status, _) = call(&app, Method::POST, &fire, Some(json!({ "transition": "->a?" }))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(&app, Method::DELETE, &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn stale_fire_is_a_conflict() {
    let app = router(Store::default());
    let (id, state) = create(&app, "a.b + ~a.c").await;
    let fire = format!("/sessions/{id}/fire");
    let [left, right] = [names(&state)[0].clone(), names(&state)[1].clone()];
    let (status, _) = call(&app, Method::POST, &fire, Some(json!({ "transition": left }))).await;
    assert_eq!(status, StatusCode::OK);
    let (status, _) = call(&app, Method::POST, &fire, Some(json!({ "transition": right }))).await;
    assert_eq!(status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn recursive_session_listing() {
    let app = router(Store::default());
    let (id, state) = create(&app, "((rec X. k?.X) | rec Y. (l!.Y + k!.Y))\\k").await;
    assert_eq!(names(&state), ["->(|1:+0:l!)\\k", "->(|0:k?)\\k*(|1:+1:k!)\\k"]);
    let fire = format!("/sessions/{id}/fire");
    let (_, after) = call(&app, Method::POST, &fire, Some(json!({ "transition": names(&state)[0] }))).await;
    assert_eq!(names(&after), ["->(|1:+0:^l!.+0:l!)\\k", "->(|0:k?)\\k*(|1:+0:^l!.+1:k!)\\k", "<-(|1:+0:l!)\\k"]);
    let (_, back) = call(&app, Method::POST, &fire, Some(json!({ "transition": names(&after)[2] }))).await;
    assert_eq!(names(&back), names(&state));
    assert_eq!(back["marking"], state["marking"]);
    assert_eq!(back["history"].as_array().unwrap().len(), 2);

    let (replayed, _) = create(&app, "((rec X. k?.X) | rec Y. (l!.Y + k!.Y))\\k").await;
    let mut last = Value::Null;
    for t in back["history"].as_array().unwrap() {
        let (status, state) =
            call(&app, Method::POST, &format!("/sessions/{replayed}/fire"), Some(json!({ "transition": t }))).await;
        assert_eq!(status, StatusCode::OK);
        last = state;
    }
    assert_eq!(last, back);
    let (_, view) = call(&app, Method::GET, &format!("/sessions/{id}/net?radius=2"), None).await;
    let (_, replayed_view) = call(&app, Method::GET, &format!("/sessions/{replayed}/net?radius=2"), None).await;
    assert_eq!(view, replayed_view);
}

#[tokio::test]
async fn net_view() {
    let app = router(Store::default());
    let (id, _) = create(&app, "a.b | ~a.c").await;
    let (status, body) = call(&app, Method::GET, &format!("/sessions/{id}/net"), None).await;
    assert_eq!(status, StatusCode::OK);
    let view: NetView = serde_json::from_value(body.clone()).unwrap();
    assert_eq!(view.forward_transitions(), 5);
    assert_eq!(view.places.len(), 11);
    assert_eq!(view.places.iter().filter(|p| p.marked).count(), 2);
    let keys = ["id", "kind", "marked"];
    assert!(body["places"].as_array().unwrap().iter().all(|p| keys.iter().all(|k| p.get(k).is_some())));
    assert!(view.places.iter().any(|p| p.kind == "synckey"));
    let sync = view.transitions.iter().find(|t| t.id == "->|0:a?*|1:a!").unwrap();
    assert_eq!(sync.label, "tau");
    assert_eq!(sync.preset, ["|0:a.b.0", "|1:~a.c.0"]);

    let (_, narrow) = call(&app, Method::GET, &format!("/sessions/{id}/net?radius=0"), None).await;
    let narrow: NetView = serde_json::from_value(narrow).unwrap();
    assert_eq!(narrow.forward_transitions(), 3);
}

#[tokio::test]
async fn concurrent_sessions_do_not_interfere() {
    let app = router(Store::default());
    let (first, _) = create(&app, "a.b.c").await;
    let (second, _) = create(&app, "~a.~b.~c").await;
    let (idle, initial) = create(&app, "a.b.c").await;
    let mut tasks = Vec::new();
    for id in [&first, &second, &first, &second, &first, &second] {
        let (stepper, id) = (app.clone(), id.clone());
        tasks.push(tokio::spawn(async move {
            loop {
                let (_, state) = call(&stepper, Method::GET, &format!("/sessions/{id}"), None).await;
                let t = names(&state).into_iter().find(|n| n.starts_with("->")).unwrap();
                let (status, _) =
                    call(&stepper, Method::POST, &format!("/sessions/{id}/fire"), Some(json!({ "transition": t })))
                        .await;
                if status == StatusCode::OK {
                    break;
                }
                assert_eq!(status, StatusCode::CONFLICT);
            }
        }));
        let (reader, idle) = (app.clone(), idle.clone());
        tasks.push(tokio::spawn(async move {
            call(&reader, Method::GET, &format!("/sessions/{idle}/net?radius=2"), None).await;
        }));
    }
    for t in tasks {
        t.await.unwrap();
    }
    let (_, a) = call(&app, Method::GET, &format!("/sessions/{first}"), None).await;
    let (_, b) = call(&app, Method::GET, &format!("/sessions/{second}"), None).await;
    assert_eq!(a["history"], json!(["->a?", "->^a?.b?", "->^a?.^b?.c?"]));
    assert_eq!(b["history"], json!(["->a!", "->^a!.b!", "->^a!.^b!.c!"]));
    let (_, c) = call(&app, Method::GET, &format!("/sessions/{idle}"), None).await;
    assert_eq!(c, initial);
}
