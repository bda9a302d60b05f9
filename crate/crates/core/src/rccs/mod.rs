//! Reversible CCS: memories, monitored processes, forward and backward
//! steps, the ancestor of a process and its marking in the encoded net.

mod marking;
mod steps;

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

pub use marking::{act_marking_update, located_path, marking, path};
pub use steps::{apply_sync_update, backward_steps, forward_steps, RLabel};

use crate::ccs::{parse_process, Action, Channel, ParseError, Process};

/// The choice a prefix was taken from: all branches, and the index taken.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Choice {
    pub branches: Vec<(Action, Process)>,
    pub taken: usize,
}

impl Choice {
    pub fn action(&self) -> &Action {
        &self.branches[self.taken].0
    }

    pub fn continuation(&self) -> &Process {
        &self.branches[self.taken].1
    }

    /// The discarded branches, as a sum.
    pub fn rest(&self) -> Process {
        Process::Sum(
            self.branches.iter().enumerate().filter(|(i, _)| *i != self.taken).map(|(_, b)| b.clone()).collect(),
        )
    }

    /// Whether the executed prefix was one branch of a proper choice.
    pub fn is_proper(&self) -> bool {
        self.branches.len() >= 2
    }

    pub fn source(&self) -> Process {
        Process::Sum(self.branches.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MemoryEvent {
    /// An action not (yet) known to be part of a synchronisation.
    Partial(Choice),
    /// One half of a synchronisation with the thread whose memory was `partner`.
    Full { partner: Memory, choice: Choice },
    /// A fork into the left (`0`) or right (`1`) side of a parallel composition.
    Split(u8),
}

impl MemoryEvent {
    pub fn choice(&self) -> Option<&Choice> {
        match self {
            MemoryEvent::Partial(c) | MemoryEvent::Full { choice: c, .. } => Some(c),
            MemoryEvent::Split(_) => None,
        }
    }
}

impl fmt::Display for MemoryEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MemoryEvent::Partial(c) => write!(f, "<*,{}^{},{}>", c.action(), c.taken, c.rest()),
            MemoryEvent::Full { partner, choice: c } => {
                write!(f, "<{partner},{}^{},{}>", c.action(), c.taken, c.rest())
            }
            MemoryEvent::Split(i) => write!(f, "<{i}>"),
        }
    }
}

/// A stack of events, stored oldest first.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Memory(Vec<MemoryEvent>);

impl Memory {
    pub fn empty() -> Memory {
        Memory(Vec::new())
    }

    pub fn from_oldest(events: Vec<MemoryEvent>) -> Memory {
        Memory(events)
    }

    pub fn oldest_first(&self) -> &[MemoryEvent] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn top(&self) -> Option<&MemoryEvent> {
        self.0.last()
    }

    /// The memory with `e` as its most recent event.
    pub fn push(&self, e: MemoryEvent) -> Memory {
        let mut events = self.0.clone();
        events.push(e);
        Memory(events)
    }

    /// The memory without its most recent event.
    pub fn tail(&self) -> Memory {
        let mut events = self.0.clone();
        events.pop();
        Memory(events)
    }

    pub fn prefix(&self, len: usize) -> Memory {
        Memory(self.0[..len].to_vec())
    }

    pub fn starts_with(&self, other: &Memory) -> bool {
        self.0.starts_with(&other.0)
    }

    pub(crate) fn events_mut(&mut self) -> &mut Vec<MemoryEvent> {
        &mut self.0
    }
}

/// Most recent event first, ending with the empty memory `<>`.
impl fmt::Display for Memory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in self.0.iter().rev() {
            write!(f, "{e}.")?;
        }
        f.write_str("<>")
    }
}

/// A reversible process: monitored threads composed in parallel and under
/// restrictions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RProcess {
    Monitored(Memory, Process),
    Par(Box<RProcess>, Box<RProcess>),
    /// A restriction extruded from a thread whose memory was `anchor`.
    Restrict {
        body: Box<RProcess>,
        channel: Channel,
        anchor: Memory,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RccsError {
    #[error("process has no ancestor; stuck at {0}")]
    NoAncestor(String),
    #[error("no thread carries a partial event on top of memory {0}")]
    NoSyncOccurrence(String),
    #[error("incoherent process: {0}")]
    Incoherent(String),
}

impl RProcess {
    /// `<> |> p`.
    pub fn initial(p: Process) -> RProcess {
        RProcess::Monitored(Memory::empty(), p)
    }

    pub fn par(l: RProcess, r: RProcess) -> RProcess {
        RProcess::Par(Box::new(l), Box::new(r))
    }

    /// Distribute memories over parallel compositions, extrude restrictions
    /// and unfold recursion heads until every thread monitors a sum.
    pub fn split_normalize(&self) -> RProcess {
        match self {
            RProcess::Monitored(m, p) => match p {
                Process::Par(l, r) => RProcess::par(
                    RProcess::Monitored(m.push(MemoryEvent::Split(0)), (**l).clone()).split_normalize(),
                    RProcess::Monitored(m.push(MemoryEvent::Split(1)), (**r).clone()).split_normalize(),
                ),
                Process::Restrict(body, c) => RProcess::Restrict {
                    body: Box::new(RProcess::Monitored(m.clone(), (**body).clone()).split_normalize()),
                    channel: c.clone(),
                    anchor: m.clone(),
                },
                Process::Rec(..) => RProcess::Monitored(m.clone(), p.unfold()).split_normalize(),
                Process::Sum(_) | Process::Var(_) => self.clone(),
            },
            RProcess::Par(l, r) => RProcess::par(l.split_normalize(), r.split_normalize()),
            RProcess::Restrict { body, channel, anchor } => RProcess::Restrict {
                body: Box::new(body.split_normalize()),
                channel: channel.clone(),
                anchor: anchor.clone(),
            },
        }
    }

    /// Every thread, left to right.
    pub fn threads(&self) -> Vec<(&Memory, &Process)> {
        let mut out = Vec::new();
        self.collect_threads(&mut out);
        out
    }

    fn collect_threads<'a>(&'a self, out: &mut Vec<(&'a Memory, &'a Process)>) {
        match self {
            RProcess::Monitored(m, p) => out.push((m, p)),
            RProcess::Par(l, r) => {
                l.collect_threads(out);
                r.collect_threads(out);
            }
            RProcess::Restrict { body, .. } => body.collect_threads(out),
        }
    }

    /// If the subtree is what splitting a single thread would produce,
    /// with no action since, return that thread's memory.
    pub(crate) fn collapse_memory(&self) -> Option<Memory> {
        match self {
            RProcess::Monitored(m, _) => Some(m.clone()),
            RProcess::Par(l, r) => {
                let ml = l.collapse_memory()?;
                let mr = r.collapse_memory()?;
                let split = |m: &Memory, i| matches!(m.top(), Some(MemoryEvent::Split(j)) if *j == i);
                (split(&ml, 0) && split(&mr, 1) && ml.tail() == mr.tail()).then(|| ml.tail())
            }
            RProcess::Restrict { body, anchor, .. } => {
                let m = body.collapse_memory()?;
                (m == *anchor).then_some(m)
            }
        }
    }

    /// The process from which this one was reached by forward steps.
    pub fn ancestor(&self) -> Result<Process, RccsError> {
        if let RProcess::Monitored(m, p) = self {
            if m.is_empty() {
                return Ok(p.clone());
            }
        }
        match rewind(self, 0) {
            Some((m, p)) if m.is_empty() => Ok(p),
            _ => Err(RccsError::NoAncestor(self.to_string())),
        }
    }
}

/// Undo every action above `floor` and merge every split, bottom-up.
fn rewind(r: &RProcess, floor: usize) -> Option<(Memory, Process)> {
    let (m, p) = match r {
        RProcess::Monitored(m, p) => (m.clone(), p.clone()),
        RProcess::Par(l, rr) => {
            let (ml, pl) = rewind(l, floor)?;
            let (mr, pr) = rewind(rr, floor)?;
            let split = |m: &Memory, i| matches!(m.top(), Some(MemoryEvent::Split(j)) if *j == i);
            if !(split(&ml, 0) && split(&mr, 1) && ml.tail() == mr.tail()) {
                return None;
            }
            (ml.tail(), Process::par(pl, pr))
        }
        RProcess::Restrict { body, channel, anchor } => {
            let (m, p) = rewind(body, anchor.len())?;
            if m != *anchor {
                return None;
            }
            (m, Process::restrict(p, channel.clone()))
        }
    };
    Some(strip_actions(m, p, floor))
}

fn strip_actions(mut m: Memory, mut p: Process, floor: usize) -> (Memory, Process) {
    while let Some(c) = m.top().and_then(MemoryEvent::choice).filter(|_| m.len() > floor) {
        p = c.source();
        m = m.tail();
    }
    (m, p)
}

/// Parse `<> |> P` or a bare process `P`.
pub fn parse_rprocess(input: &str) -> Result<RProcess, ParseError> {
    let trimmed = input.trim_start();
    let body = match trimmed.strip_prefix("<>") {
        Some(rest) => {
            let offset = input.len() - rest.len();
            rest.trim_start().strip_prefix("|>").ok_or(ParseError {
                position: offset,
                kind: crate::ccs::ParseErrorKind::UnexpectedToken { found: "text".to_string(), expected: "`|>`" },
            })?
        }
        None => input,
    };
    let p = parse_process(body)
        .map_err(|e| ParseError { position: e.position + (input.len() - body.len()), kind: e.kind })?;
    Ok(RProcess::initial(p))
}

impl fmt::Display for RProcess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RProcess::Monitored(m, p) if matches!(p, Process::Par(..)) => write!(f, "{m} |> ({p})"),
            RProcess::Monitored(m, p) => write!(f, "{m} |> {p}"),
            RProcess::Par(l, r) => {
                write!(f, "{l} || ")?;
                if matches!(**r, RProcess::Par(..)) {
                    write!(f, "({r})")
                } else {
                    write!(f, "{r}")
                }
            }
            RProcess::Restrict { body, channel, .. } => write!(f, "({body})\\{channel}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn initial(s: &str) -> RProcess {
        parse_rprocess(s).unwrap()
    }

    #[test]
    fn parses_initial_memory() {
        assert_eq!(initial("<> |> a.0"), initial("a"));
        assert!(parse_rprocess("<> a.0").is_err());
        assert_eq!(parse_rprocess("<> |> a.#").unwrap_err().position, 8);
    }

    #[test]
    fn normalization_splits_and_extrudes() {
        let r = initial("a.b | (~a.c)\\d").split_normalize();
        assert_eq!(r.to_string(), "<0>.<> |> a.b.0 || (<1>.<> |> ~a.c.0)\\d");
        assert_eq!(r.split_normalize(), r);
        assert_eq!(r.ancestor().unwrap().to_string(), "a.b.0 | (~a.c.0)\\d");
    }

    #[test]
    fn recursion_heads_unfold() {
        let r = initial("rec X. (a.X | b)").split_normalize();
        assert_eq!(r.threads().len(), 2);
        assert_eq!(r.ancestor().unwrap().to_string(), "a.(rec X. a.X | b.0) | b.0");
    }

    #[test]
    fn ancestor_keeps_actions_taken_before_a_restriction() {
        let r = initial("b.(c.b)\\a");
        let (_, after) = forward_steps(&r).into_iter().next().unwrap();
        assert_eq!(after.ancestor().unwrap().to_string(), "b.(c.b.0)\\a");
        let (_, later) = forward_steps(&after).into_iter().next().unwrap();
        assert_eq!(later.ancestor().unwrap().to_string(), "b.(c.b.0)\\a");
    }

    #[test]
    fn ancestor_of_non_reachable_process_fails() {
        let orphan = RProcess::Monitored(Memory::empty().push(MemoryEvent::Split(1)), Process::nil());
        assert!(matches!(orphan.ancestor(), Err(RccsError::NoAncestor(_))));
    }
}
