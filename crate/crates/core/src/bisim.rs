//! Bounded forward-reverse bisimulation between an RCCS process and a
//! reversible net.
//!
//! The checker walks the product of the RCCS transition system and the
//! firing relation of the net, starting from `(r, initial marking)`. Each
//! pair is related only if both sides can match each other's moves under the
//! name discipline: a step of the thread with memory `m` performing `α`
//! corresponds to the transition named `κ(m)α` (up to restriction
//! decorations and the branch index of a choice), and a synchronisation of
//! `m1` and `m2` to the sync transition whose components correspond to
//! `m1` and `m2`. Moves initiated by the net additionally require the
//! marking to be the image of the RCCS state, before and after.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::ccs::Action;
use crate::encoder::{CcsMarking, CcsNet};
use crate::names::{ActName, Decoration, TransitionName};
use crate::petri::{enabled, fire, DirectedTransition, Direction};
use crate::rccs::{backward_steps, forward_steps, marking, path, Memory, RLabel, RProcess, RccsError};

pub type CcsTransition = DirectedTransition<TransitionName>;

/// One move in a counterexample trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceEvent {
    Rccs { direction: Direction, label: RLabel },
    Net(CcsTransition),
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceEvent::Rccs { direction, label } => write!(f, "rccs {}{}", direction.arrow(), label),
            TraceEvent::Net(t) => write!(f, "net {t}"),
        }
    }
}

/// A move one side made that the other side could not match.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    /// Alternating RCCS step and net firing leading to the failing pair.
    pub trace: Vec<TraceEvent>,
    /// The unmatched move.
    pub unmatched: TraceEvent,
    /// Which clause of the bisimulation failed, from 1 to 8.
    pub clause: u8,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "clause {}: after [", self.clause)?;
        for (i, e) in self.trace.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "] unmatched {}", self.unmatched)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BisimVerdict {
    pub ok: bool,
    /// Exploration depth reached: the requested depth when ok, otherwise the
    /// length of the failing trace plus one.
    pub depth: usize,
    pub counterexample: Option<Counterexample>,
    /// Number of related pairs visited.
    pub pairs: usize,
}

/// Which side is challenged first at every pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Order {
    #[default]
    ProcessFirst,
    NetFirst,
}

/// Whether κ(m) names the location of the prefix `t`: its path without
/// restrictions is κ(m), possibly followed by the branch taken.
pub fn memory_locates(m: &Memory, t: &ActName) -> bool {
    let kappa = path(m);
    let located = t.path.without_restrictions();
    let (k, l) = (kappa.decorations(), located.decorations());
    l.starts_with(k) && (l.len() == k.len() || (l.len() == k.len() + 1 && matches!(l[k.len()], Decoration::Sum(_))))
}

/// The name discipline between RCCS labels and transitions of the same
/// direction.
pub fn names_agree(label: &RLabel, t: &TransitionName) -> bool {
    match (label.memories.as_slice(), t) {
        ([m], TransitionName::Act(a)) => a.action == label.action && memory_locates(m, a),
        ([m1, m2], TransitionName::Sync(pair)) if label.action == Action::Tau => {
            let (c1, c2) = pair.components();
            (memory_locates(m1, c1) && memory_locates(m2, c2)) || (memory_locates(m1, c2) && memory_locates(m2, c1))
        }
        _ => false,
    }
}

fn clause(direction: Direction, sync: bool, net_first: bool) -> u8 {
    let base = match (direction, sync) {
        (Direction::Fwd, false) => 1,
        (Direction::Bwd, false) => 2,
        (Direction::Fwd, true) => 3,
        (Direction::Bwd, true) => 4,
    };
    if net_first {
        base + 4
    } else {
        base
    }
}

type Pair = (RProcess, CcsMarking);

struct Product<'a> {
    net: &'a CcsNet,
}

enum Challenge {
    Matched(Vec<(TraceEvent, TraceEvent, Pair)>),
    Failed { unmatched: TraceEvent, clause: u8 },
}

impl Product<'_> {
    fn rccs_moves(&self, r: &RProcess) -> Vec<(Direction, RLabel, RProcess)> {
        let fwd = forward_steps(r).into_iter().map(|(l, t)| (Direction::Fwd, l, t));
        let bwd = backward_steps(r).into_iter().map(|(l, t)| (Direction::Bwd, l, t));
        fwd.chain(bwd).collect()
    }

    fn net_moves(&self, m: &CcsMarking) -> Result<Vec<(CcsTransition, CcsMarking)>, RccsError> {
        enabled(self.net, m)
            .into_iter()
            .map(|t| {
                let next = fire(self.net, m, &t).map_err(|e| RccsError::Incoherent(alloc::format!("{e:?}")))?;
                Ok((t, next))
            })
            .collect()
    }

    /// Clauses 1 to 4: every RCCS move is matched by a net firing leading to
    /// the image of the target.
    fn process_first(&self, (r, m): &Pair) -> Result<Challenge, RccsError> {
        let net_moves = self.net_moves(m)?;
        let mut out = Vec::new();
        for (direction, label, target) in self.rccs_moves(r) {
            let image = marking(&target)?;
            let found = net_moves
                .iter()
                .find(|(t, next)| t.direction == direction && names_agree(&label, &t.name) && *next == image);
            let step = TraceEvent::Rccs { direction, label: label.clone() };
            match found {
                Some((t, next)) => out.push((step, TraceEvent::Net(t.clone()), (target, next.clone()))),
                None => {
                    return Ok(Challenge::Failed { clause: clause(direction, label.is_sync(), false), unmatched: step })
                }
            }
        }
        Ok(Challenge::Matched(out))
    }

    /// Clauses 5 to 8: every net firing is matched by an RCCS move, with the
    /// marking the image of the RCCS state on both ends.
    fn net_first(&self, (r, m): &Pair) -> Result<Challenge, RccsError> {
        let rccs_moves = self.rccs_moves(r);
        let here_agrees = marking(r)? == *m;
        let mut out = Vec::new();
        for (t, next) in self.net_moves(m)? {
            let sync = matches!(t.name, TransitionName::Sync(_));
            let mut found = None;
            if here_agrees {
                for (direction, label, target) in &rccs_moves {
                    if *direction == t.direction && names_agree(label, &t.name) && marking(target)? == next {
                        found = Some((*direction, label.clone(), target.clone()));
                        break;
                    }
                }
            }
            match found {
                Some((direction, label, target)) => {
                    out.push((TraceEvent::Rccs { direction, label }, TraceEvent::Net(t), (target, next)));
                }
                None => {
                    return Ok(Challenge::Failed {
                        clause: clause(t.direction, sync, true),
                        unmatched: TraceEvent::Net(t),
                    })
                }
            }
        }
        Ok(Challenge::Matched(out))
    }
}

/// Checks the forward-reverse bisimulation clauses on every pair reachable
/// within `depth` moves from `(r, n's initial marking)`.
pub fn check_frbisim(r: &RProcess, n: &CcsNet, depth: usize) -> Result<BisimVerdict, RccsError> {
    check_frbisim_with(r, n, depth, Order::ProcessFirst)
}

/// [`check_frbisim`] choosing which side is challenged first.
pub fn check_frbisim_with(r: &RProcess, n: &CcsNet, depth: usize, order: Order) -> Result<BisimVerdict, RccsError> {
    marking(r)?;
    let product = Product { net: n };
    let start: Pair = (r.split_normalize(), n.initial().clone());
    let mut seen: BTreeSet<Pair> = BTreeSet::new();
    seen.insert(start.clone());
    let mut queue: VecDeque<(Pair, Vec<TraceEvent>)> = VecDeque::from([(start, Vec::new())]);
    while let Some((pair, trace)) = queue.pop_front() {
        let challenges = match order {
            Order::ProcessFirst => [product.process_first(&pair)?, product.net_first(&pair)?],
            Order::NetFirst => [product.net_first(&pair)?, product.process_first(&pair)?],
        };
        for challenge in challenges {
            match challenge {
                Challenge::Failed { unmatched, clause } => {
                    let depth = trace.len() / 2 + 1;
                    return Ok(BisimVerdict {
                        ok: false,
                        depth,
                        counterexample: Some(Counterexample { trace, unmatched, clause }),
                        pairs: seen.len(),
                    });
                }
                Challenge::Matched(moves) if trace.len() / 2 < depth => {
                    for (step, firing, next) in moves {
                        if seen.insert(next.clone()) {
                            let mut longer = trace.clone();
                            longer.push(step);
                            longer.push(firing);
                            queue.push_back((next, longer));
                        }
                    }
                }
                Challenge::Matched(_) => {}
            }
        }
    }
    Ok(BisimVerdict { ok: true, depth, counterexample: None, pairs: seen.len() })
}

/// Replays a trace on both sides, returning the pair it leads to, or the
/// index of the first event that cannot be replayed.
pub fn replay(r: &RProcess, n: &CcsNet, trace: &[TraceEvent]) -> Result<(RProcess, CcsMarking), usize> {
    let mut state = r.split_normalize();
    let mut m = n.initial().clone();
    for (i, event) in trace.iter().enumerate() {
        match event {
            TraceEvent::Rccs { direction, label } => {
                let steps = match direction {
                    Direction::Fwd => forward_steps(&state),
                    Direction::Bwd => backward_steps(&state),
                };
                let target = steps.into_iter().find(|(l, _)| l == label).ok_or(i)?;
                state = target.1;
            }
            TraceEvent::Net(t) => m = fire(n, &m, t).map_err(|_| i)?,
        }
    }
    Ok((state, m))
}

/// The RCCS move of `r` matching the firing of `t` that leads to `next`.
pub fn matching_step(
    r: &RProcess,
    t: &CcsTransition,
    next: &CcsMarking,
) -> Result<Option<(RLabel, RProcess)>, RccsError> {
    let steps = match t.direction {
        Direction::Fwd => forward_steps(r),
        Direction::Bwd => backward_steps(r),
    };
    for (label, target) in steps {
        if names_agree(&label, &t.name) && marking(&target)? == *next {
            return Ok(Some((label, target)));
        }
    }
    Ok(None)
}

/// Renders a trace one event per entry.
pub fn render_trace(trace: &[TraceEvent]) -> Vec<String> {
    trace.iter().map(|e| e.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::encode_reversible;
    use crate::rccs::parse_rprocess;

    fn check(term: &str, depth: usize) -> BisimVerdict {
        let r = parse_rprocess(term).unwrap();
        let n = encode_reversible(&r).unwrap();
        check_frbisim(&r, &n, depth).unwrap()
    }

    #[test]
    fn related_terms() {
        for term in ["0", "a.b | ~a.c", "a.b + ~a.c", "(a.b | ~a.c)\\a", "a.a | (~a + b)", "rec X. a.X"] {
            let v = check(term, 6);
            assert!(v.ok, "{term}: {}", v.counterexample.unwrap());
        }
    }

    #[test]
    fn label_mismatch_fails_first_clause() {
        let r = parse_rprocess("a.0").unwrap();
        let n = encode_reversible(&parse_rprocess("b.0").unwrap()).unwrap();
        let v = check_frbisim(&r, &n, 4).unwrap();
        assert!(!v.ok);
        assert_eq!(v.depth, 1);
        let cx = v.counterexample.unwrap();
        assert_eq!(cx.clause, 1);
        assert!(cx.trace.is_empty());
        let v = check_frbisim_with(&r, &n, 4, Order::NetFirst).unwrap();
        assert_eq!(v.counterexample.unwrap().clause, 5);
    }

    #[test]
    fn forward_only_net_fails_backward_clause() {
        let r = parse_rprocess("a.b.0").unwrap();
        let n = crate::encoder::encode(&r.ancestor().unwrap()).unwrap();
        let v = check_frbisim(&r, &n, 4).unwrap();
        let cx = v.counterexample.unwrap();
        assert_eq!(cx.clause, 2);
        assert_eq!(cx.trace.len(), 2);
        assert_eq!(v.depth, 2);
        assert!(replay(&r, &n, &cx.trace).is_ok());
    }

    #[test]
    fn sync_names() {
        let r = parse_rprocess("a.b | ~a.c").unwrap();
        let (label, _) = forward_steps(&r).into_iter().find(|(l, _)| l.is_sync()).unwrap();
        let n = encode_reversible(&r).unwrap();
        let ts = enabled(&n, n.initial());
        let matching: Vec<_> = ts.iter().filter(|t| names_agree(&label, &t.name)).collect();
        assert_eq!(matching.len(), 1);
        assert_eq!(matching[0].to_string(), "->|0:a?*|1:a!");
    }

    #[test]
    fn firings_map_back_to_steps() {
        let r = parse_rprocess("a.b | ~a.c").unwrap().split_normalize();
        let n = encode_reversible(&r).unwrap();
        for t in enabled(&n, n.initial()) {
            let next = fire(&n, n.initial(), &t).unwrap();
            let (label, target) = matching_step(&r, &t, &next).unwrap().unwrap();
            assert!(names_agree(&label, &t.name));
            let (back, _) = matching_step(&target, &t.reversed(), n.initial()).unwrap().unwrap();
            assert_eq!(back, label);
        }
        let t = enabled(&n, n.initial()).into_iter().next().unwrap();
        assert!(matching_step(&r, &t, n.initial()).unwrap().is_none());
    }
}
