//! HTTP/JSON session API.
//!
//! | method | path | body | response |
//! |---|---|---|---|
//! | POST | `/sessions` | `{term}` | `{id, state}` |
//! | GET | `/sessions/{id}` | | state |
//! | POST | `/sessions/{id}/fire` | `{transition}` | state |
//! | POST | `/sessions/{id}/undo` | | state |
//! | GET | `/sessions/{id}/net?radius=N` | | net view |
//! | DELETE | `/sessions/{id}` | | 204 |
//!
//! Errors are `{error}` with 400 for bad terms, 404 for unknown sessions and
//! 409 for transitions that are not enabled in the current state.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex};

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use crate::export::NetView;
use crate::session::{Session, SessionError, SessionState};

pub const MAX_RADIUS: usize = 8;

#[derive(Default)]
struct Sessions {
    next_id: u64,
    live: HashMap<String, Arc<Mutex<Session>>>,
}

/// In-memory sessions. Each session is locked independently, so requests on
/// different sessions proceed concurrently.
#[derive(Clone, Default)]
pub struct Store(Arc<Mutex<Sessions>>);

impl Store {
    fn insert(&self, session: Session) -> String {
        let mut sessions = self.0.lock().expect("session store poisoned");
        sessions.next_id += 1;
        let id = sessions.next_id.to_string();
        sessions.live.insert(id.clone(), Arc::new(Mutex::new(session)));
        id
    }

    fn get(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        let sessions = self.0.lock().expect("session store poisoned");
        sessions.live.get(id).cloned().ok_or_else(|| ApiError::UnknownSession(id.to_string()))
    }

    fn remove(&self, id: &str) -> Result<(), ApiError> {
        let mut sessions = self.0.lock().expect("session store poisoned");
        sessions.live.remove(id).map(|_| ()).ok_or_else(|| ApiError::UnknownSession(id.to_string()))
    }

    fn with<T>(&self, id: &str, f: impl FnOnce(&mut Session) -> Result<T, SessionError>) -> Result<T, ApiError> {
        let session = self.get(id)?;
        let mut session = session.lock().expect("session poisoned");
        f(&mut session).map_err(ApiError::Session)
    }
}

#[derive(Debug)]
pub enum ApiError {
    UnknownSession(String),
    Session(SessionError),
    BadRadius(usize),
}

#[derive(Serialize)]
struct ErrorBody {
    error: String,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, error) = match self {
            ApiError::UnknownSession(id) => (StatusCode::NOT_FOUND, format!("no session `{id}`")),
            ApiError::BadRadius(r) => (StatusCode::BAD_REQUEST, format!("radius {r} exceeds {MAX_RADIUS}")),
            ApiError::Session(e) if e.is_input() => (StatusCode::BAD_REQUEST, e.to_string()),
            ApiError::Session(e @ (SessionError::NotEnabled(_) | SessionError::NothingToUndo)) => {
                (StatusCode::CONFLICT, e.to_string())
            }
            ApiError::Session(e) => (StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
        };
        (status, Json(ErrorBody { error })).into_response()
    }
}

#[derive(Deserialize)]
struct CreateRequest {
    term: String,
}

#[derive(Serialize)]
struct Created {
    id: String,
    state: SessionState,
}

#[derive(Deserialize)]
struct FireRequest {
    transition: String,
}

#[derive(Deserialize)]
struct NetQuery {
    #[serde(default = "default_radius")]
    radius: usize,
}

fn default_radius() -> usize {
    1
}

async fn create(
    State(store): State<Store>,
    Json(req): Json<CreateRequest>,
) -> Result<(StatusCode, Json<Created>), ApiError> {
    let session = Session::new(&req.term).map_err(ApiError::Session)?;
    let state = session.state();
    let id = store.insert(session);
    Ok((StatusCode::CREATED, Json(Created { id, state })))
}

async fn show(State(store): State<Store>, Path(id): Path<String>) -> Result<Json<SessionState>, ApiError> {
    store.with(&id, |s| Ok(s.state())).map(Json)
}

async fn fire(
    State(store): State<Store>,
    Path(id): Path<String>,
    Json(req): Json<FireRequest>,
) -> Result<Json<SessionState>, ApiError> {
    store.with(&id, |s| s.fire(&req.transition).map(|_| s.state())).map(Json)
}

async fn undo(State(store): State<Store>, Path(id): Path<String>) -> Result<Json<SessionState>, ApiError> {
    store.with(&id, |s| s.undo().map(|_| s.state())).map(Json)
}

async fn net(
    State(store): State<Store>,
    Path(id): Path<String>,
    Query(q): Query<NetQuery>,
) -> Result<Json<NetView>, ApiError> {
    if q.radius > MAX_RADIUS {
        return Err(ApiError::BadRadius(q.radius));
    }
    store.with(&id, |s| Ok(s.view(q.radius))).map(Json)
}

async fn delete(State(store): State<Store>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    store.remove(&id).map(|_| StatusCode::NO_CONTENT)
}

pub fn router(store: Store) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(show).delete(delete))
        .route("/sessions/{id}/fire", post(fire))
        .route("/sessions/{id}/undo", post(undo))
        .route("/sessions/{id}/net", get(net))
        .with_state(store)
}

pub async fn serve(addr: SocketAddr) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(Store::default()))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
