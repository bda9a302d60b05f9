//! JSON and DOT renderings of finite nets.

use std::collections::BTreeMap;
use std::fmt::Write;

use revccs_core::encoder::{CcsFiniteNet, CcsMarking};
use serde::{Deserialize, Serialize};

use crate::session::direction_name;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceView {
    pub id: String,
    pub kind: String,
    pub marked: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionView {
    pub id: String,
    pub direction: String,
    pub label: String,
    pub preset: Vec<String>,
    pub postset: Vec<String>,
}

/// A finite net with the places marked at some marking. Ids are the rendered
/// names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetView {
    pub places: Vec<PlaceView>,
    pub transitions: Vec<TransitionView>,
}

impl NetView {
    pub fn new(net: &CcsFiniteNet, marking: &CcsMarking) -> NetView {
        let places = net
            .places()
            .iter()
            .map(|p| PlaceView { id: p.to_string(), kind: p.kind().to_string(), marked: marking.contains(p) })
            .collect();
        let transitions = net
            .transitions()
            .map(|(t, arcs)| TransitionView {
                id: t.to_string(),
                direction: direction_name(t.direction).to_string(),
                label: t.name.label().to_string(),
                preset: arcs.preset.iter().map(|p| p.to_string()).collect(),
                postset: arcs.postset.iter().map(|p| p.to_string()).collect(),
            })
            .collect();
        NetView { places, transitions }
    }

    pub fn forward_transitions(&self) -> usize {
        self.transitions.iter().filter(|t| t.direction == "fwd").count()
    }

    pub fn to_dot(&self) -> String {
        let node: BTreeMap<&str, String> = self
            .places
            .iter()
            .enumerate()
            .map(|(i, p)| (p.id.as_str(), format!("p{i}")))
            .chain(self.transitions.iter().enumerate().map(|(i, t)| (t.id.as_str(), format!("t{i}"))))
            .collect();
        let mut out = String::from("digraph net {\n  rankdir=TB;\n");
        for p in &self.places {
            let style = match (p.kind.as_str(), p.marked) {
                ("proc", false) => "",
                ("proc", true) => ", penwidth=2, xlabel=\"●\"",
                (_, false) => ", style=filled, fillcolor=gray85",
                (_, true) => ", style=filled, fillcolor=gray85, penwidth=2, xlabel=\"●\"",
            };
            let _ = writeln!(out, "  {} [shape=circle, label=\"{}\"{style}];", node[p.id.as_str()], escape(&p.id));
        }
        for t in &self.transitions {
            let colour = if t.direction == "bwd" { ", color=red, fontcolor=red" } else { "" };
            let _ = writeln!(out, "  {} [shape=box, label=\"{}\"{colour}];", node[t.id.as_str()], escape(&t.id));
            for p in &t.preset {
                let _ = writeln!(out, "  {} -> {};", node[p.as_str()], node[t.id.as_str()]);
            }
            for p in &t.postset {
                let _ = writeln!(out, "  {} -> {};", node[t.id.as_str()], node[p.as_str()]);
            }
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
