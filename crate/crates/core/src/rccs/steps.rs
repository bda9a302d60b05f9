use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

use super::{Choice, Memory, MemoryEvent, RProcess, RccsError};
use crate::ccs::{Action, Channel, Process};

/// The label of an RCCS step: one memory and its action, or the two
/// memories of a synchronisation (left thread first) with action `tau`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RLabel {
    pub memories: Vec<Memory>,
    pub action: Action,
}

impl RLabel {
    pub fn single(m: Memory, action: Action) -> RLabel {
        RLabel { memories: alloc::vec![m], action }
    }

    pub fn sync(m1: Memory, m2: Memory) -> RLabel {
        RLabel { memories: alloc::vec![m1, m2], action: Action::Tau }
    }

    pub fn is_sync(&self) -> bool {
        self.memories.len() == 2
    }
}

impl fmt::Display for RLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<_> = self.memories.iter().map(|m| m.to_string()).collect();
        write!(f, "{}:{}", parts.join(","), self.action)
    }
}

/// One thread's contribution to a step, and the subtree it leaves behind.
struct Half {
    memory: Memory,
    action: Action,
    partner: Option<Memory>,
    result: RProcess,
}

struct Moves {
    halves: Vec<Half>,
    syncs: Vec<(RLabel, RProcess)>,
}

fn lift(moves: Moves, wrap: &dyn Fn(RProcess) -> RProcess) -> Moves {
    Moves {
        halves: moves.halves.into_iter().map(|h| Half { result: wrap(h.result), ..h }).collect(),
        syncs: moves.syncs.into_iter().map(|(l, r)| (l, wrap(r))).collect(),
    }
}

fn restrict_wrap(channel: &Channel, anchor: &Memory) -> impl Fn(RProcess) -> RProcess {
    let (channel, anchor) = (channel.clone(), anchor.clone());
    move |body| RProcess::Restrict { body: Box::new(body), channel: channel.clone(), anchor: anchor.clone() }
}

fn forward(r: &RProcess) -> Moves {
    match r {
        RProcess::Monitored(m, p) => {
            let Process::Sum(branches) = p.unfold() else {
                return Moves { halves: Vec::new(), syncs: Vec::new() };
            };
            let halves = (0..branches.len())
                .map(|z| {
                    let choice = Choice { branches: branches.clone(), taken: z };
                    Half {
                        memory: m.clone(),
                        action: choice.action().clone(),
                        partner: None,
                        result: RProcess::Monitored(
                            m.push(MemoryEvent::Partial(choice.clone())),
                            choice.continuation().clone(),
                        ),
                    }
                })
                .collect();
            Moves { halves, syncs: Vec::new() }
        }
        RProcess::Par(l, rr) => {
            let left = forward(l);
            let right = forward(rr);
            let mut syncs = Vec::new();
            for h1 in &left.halves {
                for h2 in &right.halves {
                    if h1.action.is_dual_of(&h2.action) {
                        let joined = RProcess::par(h1.result.clone(), h2.result.clone());
                        let updated = apply_sync_update(&joined, &h1.memory, &h2.memory)
                            .expect("both threads just pushed a partial event");
                        syncs.push((RLabel::sync(h1.memory.clone(), h2.memory.clone()), updated));
                    }
                }
            }
            let right_sibling = (**rr).clone();
            let left_sibling = (**l).clone();
            let mut out = lift(left, &|x| RProcess::par(x, right_sibling.clone()));
            let from_right = lift(right, &|x| RProcess::par(left_sibling.clone(), x));
            out.halves.extend(from_right.halves);
            out.syncs.extend(from_right.syncs);
            out.syncs.extend(syncs);
            out
        }
        RProcess::Restrict { body, channel, anchor } => {
            let mut inner = forward(body);
            inner.halves.retain(|h| !h.action.blocked_by(channel));
            lift(inner, &restrict_wrap(channel, anchor))
        }
    }
}

/// Forward steps of `r`, with targets in split-normal form.
pub fn forward_steps(r: &RProcess) -> BTreeSet<(RLabel, RProcess)> {
    let moves = forward(&r.split_normalize());
    let singles = moves.halves.into_iter().map(|h| (RLabel::single(h.memory, h.action), h.result));
    singles.chain(moves.syncs).map(|(label, target)| (label, target.split_normalize())).collect()
}

fn backward(r: &RProcess) -> Moves {
    if let Some(m) = r.collapse_memory() {
        let partner = match m.top() {
            Some(MemoryEvent::Partial(_)) => Some(None),
            Some(MemoryEvent::Full { partner, .. }) => Some(Some(partner.clone())),
            _ => None,
        };
        if let (Some(partner), Some(choice)) = (partner, m.top().and_then(MemoryEvent::choice)) {
            let undo = Half {
                memory: m.tail(),
                action: choice.action().clone(),
                partner,
                result: RProcess::Monitored(m.tail(), choice.source()),
            };
            return Moves { halves: alloc::vec![undo], syncs: Vec::new() };
        }
    }
    match r {
        RProcess::Monitored(..) => Moves { halves: Vec::new(), syncs: Vec::new() },
        RProcess::Par(l, rr) => {
            let left = backward(l);
            let right = backward(rr);
            let mut syncs = Vec::new();
            for h1 in &left.halves {
                for h2 in &right.halves {
                    if h1.partner.as_ref() == Some(&h2.memory)
                        && h2.partner.as_ref() == Some(&h1.memory)
                        && h1.action.is_dual_of(&h2.action)
                    {
                        let target = RProcess::par(h1.result.clone(), h2.result.clone());
                        syncs.push((RLabel::sync(h1.memory.clone(), h2.memory.clone()), target));
                    }
                }
            }
            let right_sibling = (**rr).clone();
            let left_sibling = (**l).clone();
            let mut out = lift(left, &|x| RProcess::par(x, right_sibling.clone()));
            let from_right = lift(right, &|x| RProcess::par(left_sibling.clone(), x));
            out.halves.extend(from_right.halves);
            out.syncs.extend(from_right.syncs);
            out.syncs.extend(syncs);
            out
        }
        RProcess::Restrict { body, channel, anchor } => {
            let mut inner = backward(body);
            inner.halves.retain(|h| !h.action.blocked_by(channel));
            lift(inner, &restrict_wrap(channel, anchor))
        }
    }
}

/// Backward steps of `r`: undoing the most recent action of a thread, or
/// both halves of a synchronisation at once.
pub fn backward_steps(r: &RProcess) -> BTreeSet<(RLabel, RProcess)> {
    let moves = backward(&r.split_normalize());
    let singles = moves
        .halves
        .into_iter()
        .filter(|h| h.partner.is_none())
        .map(|h| (RLabel::single(h.memory, h.action), h.result));
    singles.chain(moves.syncs).collect()
}

/// Turn the partial events pushed on top of `m1` and `m2` into the two
/// halves of a synchronisation referring to each other.
pub fn apply_sync_update(r: &RProcess, m1: &Memory, m2: &Memory) -> Result<RProcess, RccsError> {
    let mut hits = (false, false);
    let updated = update(r, m1, m2, &mut hits);
    match hits {
        (true, true) => Ok(updated),
        (false, _) => Err(RccsError::NoSyncOccurrence(m1.to_string())),
        (_, false) => Err(RccsError::NoSyncOccurrence(m2.to_string())),
    }
}

fn update(r: &RProcess, m1: &Memory, m2: &Memory, hits: &mut (bool, bool)) -> RProcess {
    match r {
        RProcess::Monitored(m, p) => RProcess::Monitored(update_memory(m, m1, m2, hits), p.clone()),
        RProcess::Par(l, rr) => RProcess::par(update(l, m1, m2, hits), update(rr, m1, m2, hits)),
        RProcess::Restrict { body, channel, anchor } => RProcess::Restrict {
            body: Box::new(update(body, m1, m2, hits)),
            channel: channel.clone(),
            anchor: update_memory(anchor, m1, m2, hits),
        },
    }
}

fn update_memory(m: &Memory, m1: &Memory, m2: &Memory, hits: &mut (bool, bool)) -> Memory {
    let mut out = m.clone();
    for (own, partner, hit) in [(m1, m2, &mut hits.0), (m2, m1, &mut hits.1)] {
        if out.len() > own.len() && out.starts_with(own) {
            let events = out.events_mut();
            if let MemoryEvent::Partial(choice) = &events[own.len()] {
                events[own.len()] = MemoryEvent::Full { partner: partner.clone(), choice: choice.clone() };
                *hit = true;
            }
        }
    }
    out
}
