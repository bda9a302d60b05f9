//! A stepping session over the reversible net of a term, kept in lockstep
//! with the RCCS process it simulates.

use revccs_core::bisim::{matching_step, CcsTransition};
use revccs_core::ccs::{parse_process, ParseError, Process};
use revccs_core::encoder::{encode_reversible, CcsMarking, CcsNet, EncodeError};
use revccs_core::names::TransitionName;
use revccs_core::petri::{enabled, explore, fire, Direction};
use revccs_core::rccs::{RProcess, RccsError};
use serde::Serialize;
use thiserror::Error;

use crate::export::NetView;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("invalid process: {0}")]
    Encode(#[from] EncodeError),
    #[error("transition `{0}` is not enabled")]
    NotEnabled(String),
    #[error("nothing to undo")]
    NothingToUndo,
    #[error("net and process disagree after `{0}`")]
    Desynchronised(String),
    #[error(transparent)]
    Rccs(#[from] RccsError),
}

impl SessionError {
    /// Errors caused by the input rather than by the session state.
    pub fn is_input(&self) -> bool {
        matches!(self, SessionError::Parse(_) | SessionError::Encode(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnabledView {
    pub name: String,
    pub direction: &'static str,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SessionState {
    pub term: String,
    pub rccs: String,
    pub marking: Vec<String>,
    pub enabled: Vec<EnabledView>,
    pub history: Vec<String>,
}

pub fn direction_name(d: Direction) -> &'static str {
    match d {
        Direction::Fwd => "fwd",
        Direction::Bwd => "bwd",
    }
}

/// Presentation order: forward before backward, single prefixes before
/// synchronisations, then by name.
pub fn menu_order(ts: impl IntoIterator<Item = CcsTransition>) -> Vec<CcsTransition> {
    let mut out: Vec<_> = ts.into_iter().collect();
    out.sort_by_key(|t| (t.direction, matches!(t.name, TransitionName::Sync(_)), t.to_string()));
    out
}

#[derive(Debug)]
pub struct Session {
    term: Process,
    net: CcsNet,
    rccs: RProcess,
    marking: CcsMarking,
    past: Vec<(RProcess, CcsMarking)>,
    history: Vec<CcsTransition>,
}

impl Session {
    pub fn new(text: &str) -> Result<Session, SessionError> {
        Session::from_process(parse_process(text)?)
    }

    pub fn from_process(term: Process) -> Result<Session, SessionError> {
        let rccs = RProcess::initial(term.clone());
        let net = encode_reversible(&rccs)?;
        let marking = net.initial().clone();
        Ok(Session { term, net, rccs: rccs.split_normalize(), marking, past: Vec::new(), history: Vec::new() })
    }

    pub fn net(&self) -> &CcsNet {
        &self.net
    }

    pub fn rccs(&self) -> &RProcess {
        &self.rccs
    }

    pub fn marking(&self) -> &CcsMarking {
        &self.marking
    }

    pub fn history(&self) -> &[CcsTransition] {
        &self.history
    }

    pub fn enabled(&self) -> Vec<CcsTransition> {
        menu_order(enabled(&self.net, &self.marking))
    }

    /// Fires the enabled transition rendered as `name`.
    pub fn fire(&mut self, name: &str) -> Result<(), SessionError> {
        let t = self
            .enabled()
            .into_iter()
            .find(|t| t.to_string() == name)
            .ok_or_else(|| SessionError::NotEnabled(name.to_string()))?;
        self.fire_transition(t)
    }

    pub fn fire_transition(&mut self, t: CcsTransition) -> Result<(), SessionError> {
        let next = fire(&self.net, &self.marking, &t).map_err(|_| SessionError::NotEnabled(t.to_string()))?;
        let (_, target) =
            matching_step(&self.rccs, &t, &next)?.ok_or_else(|| SessionError::Desynchronised(t.to_string()))?;
        let previous = (std::mem::replace(&mut self.rccs, target), std::mem::replace(&mut self.marking, next));
        self.past.push(previous);
        self.history.push(t);
        Ok(())
    }

    /// Returns to the state before the last firing.
    pub fn undo(&mut self) -> Result<(), SessionError> {
        let (rccs, marking) = self.past.pop().ok_or(SessionError::NothingToUndo)?;
        self.rccs = rccs;
        self.marking = marking;
        self.history.pop();
        Ok(())
    }

    pub fn state(&self) -> SessionState {
        SessionState {
            term: self.term.to_string(),
            rccs: self.rccs.to_string(),
            marking: self.marking.iter().map(|p| p.to_string()).collect(),
            enabled: self
                .enabled()
                .into_iter()
                .map(|t| EnabledView {
                    name: t.to_string(),
                    direction: direction_name(t.direction),
                    label: t.name.label().to_string(),
                })
                .collect(),
            history: self.history.iter().map(|t| t.to_string()).collect(),
        }
    }

    /// The net around the current marking, `radius` firings deep.
    pub fn view(&self, radius: usize) -> NetView {
        let around = explore(&self.net.with_initial(self.marking.clone()), radius)
            .expect("reversible nets of processes are safe");
        NetView::new(&around, &self.marking)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fire_and_undo() {
        let mut s = Session::new("a.0").unwrap();
        let first = s.state();
        assert_eq!(first.enabled.len(), 1);
        assert_eq!(first.enabled[0].name, "->a?");
        s.fire("->a?").unwrap();
        assert_eq!(s.state().enabled.iter().map(|e| e.name.as_str()).collect::<Vec<_>>(), ["<-a?"]);
        assert_eq!(s.state().history, ["->a?"]);
        s.undo().unwrap();
        assert_eq!(s.state(), first);
        assert!(matches!(s.undo(), Err(SessionError::NothingToUndo)));
        assert!(matches!(s.fire("->b?"), Err(SessionError::NotEnabled(_))));
    }

    #[test]
    fn reversing_restores_the_state() {
        let mut s = Session::new("a.b | ~a.c").unwrap();
        let first = s.state();
        let sync = first.enabled.iter().find(|e| e.label == "tau").unwrap().name.clone();
        s.fire(&sync).unwrap();
        s.fire(&sync.replacen("->", "<-", 1)).unwrap();
        assert_eq!(s.state().rccs, first.rccs);
        assert_eq!(s.state().enabled, first.enabled);
        assert_eq!(s.history().len(), 2);
    }

    #[test]
    fn input_errors() {
        assert!(Session::new("a.").unwrap_err().is_input());
        assert!(Session::new("rec X. X").unwrap_err().is_input());
        assert!(!SessionError::NothingToUndo.is_input());
    }
}
