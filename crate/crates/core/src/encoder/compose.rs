use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::{CcsFiniteNet, CcsMarking};
use crate::ccs::Process;
use crate::names::{ActName, Decoration, Path, PlaceName, TransitionName};
use crate::petri::{DirectedTransition, FiniteNet};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ComposeError {
    #[error("recursive processes have infinite nets; use the lazy encoding")]
    Recursive,
}

struct Parts {
    places: BTreeSet<PlaceName>,
    transitions: Vec<(TransitionName, CcsMarking, CcsMarking)>,
    initial: CcsMarking,
}

impl Parts {
    fn decorate(self, d: &Decoration) -> Parts {
        Parts {
            places: self.places.iter().map(|p| p.decorate(d)).collect(),
            transitions: self
                .transitions
                .into_iter()
                .map(|(t, pre, post)| {
                    (
                        t.decorate(d),
                        pre.iter().map(|p| p.decorate(d)).collect(),
                        post.iter().map(|p| p.decorate(d)).collect(),
                    )
                })
                .collect(),
            initial: self.initial.iter().map(|p| p.decorate(d)).collect(),
        }
    }

    fn union(mut self, other: Parts) -> Parts {
        self.places.extend(other.places);
        self.transitions.extend(other.transitions);
        self.initial.extend(other.initial);
        self
    }
}

/// The complete net of a recursion-free process, built operator by operator.
pub fn compose(p: &Process) -> Result<CcsFiniteNet, ComposeError> {
    let parts = build(p)?;
    let mut net = FiniteNet::new(parts.initial);
    for place in parts.places {
        net.add_place(place);
    }
    for (t, pre, post) in parts.transitions {
        net.add_transition(DirectedTransition::fwd(t), pre, post)
            .expect("composed transitions are distinct and have presets");
    }
    Ok(net)
}

fn build(p: &Process) -> Result<Parts, ComposeError> {
    match p {
        Process::Sum(branches) if branches.is_empty() => {
            let place = PlaceName::proc(Path::root(), p.clone());
            Ok(Parts { places: [place.clone()].into(), transitions: Vec::new(), initial: [place].into() })
        }
        Process::Sum(branches) if branches.len() == 1 => {
            let (action, continuation) = &branches[0];
            let past = Decoration::Past(action.clone());
            let inner = build(continuation)?.decorate(&past);
            let t = ActName::new(Path::root(), action.clone());
            let start = PlaceName::proc(Path::root(), p.clone());
            let mut post = inner.initial.clone();
            post.insert(t.key_place());
            let mut places = inner.places;
            places.insert(start.clone());
            places.insert(t.key_place());
            let mut transitions = inner.transitions;
            transitions.push((TransitionName::Act(t), [start.clone()].into(), post));
            Ok(Parts { places, transitions, initial: [start].into() })
        }
        Process::Sum(branches) => {
            let nets: Vec<Parts> = branches
                .iter()
                .enumerate()
                .map(|(i, b)| Ok(build(&Process::Sum(alloc::vec![b.clone()]))?.decorate(&Decoration::Sum(i))))
                .collect::<Result<_, ComposeError>>()?;
            let initials: Vec<CcsMarking> = nets.iter().map(|n| n.initial.clone()).collect();
            let mut out = Parts { places: BTreeSet::new(), transitions: Vec::new(), initial: BTreeSet::new() };
            for (i, mut n) in nets.into_iter().enumerate() {
                for (_, pre, _) in n.transitions.iter_mut() {
                    if pre.is_subset(&initials[i]) {
                        for (j, other) in initials.iter().enumerate() {
                            if j != i {
                                pre.extend(other.iter().cloned());
                            }
                        }
                    }
                }
                out = out.union(n);
            }
            Ok(out)
        }
        Process::Par(l, r) => {
            let left = build(l)?.decorate(&Decoration::Par(0));
            let right = build(r)?.decorate(&Decoration::Par(1));
            let mut syncs = Vec::new();
            for (t1, pre1, post1) in &left.transitions {
                for (t2, pre2, post2) in &right.transitions {
                    let (TransitionName::Act(a1), TransitionName::Act(a2)) = (t1, t2) else { continue };
                    if !a1.action.is_dual_of(&a2.action) {
                        continue;
                    }
                    let pre: CcsMarking = pre1.union(pre2).cloned().collect();
                    let mut post: CcsMarking = post1
                        .iter()
                        .chain(post2)
                        .filter(|s| **s != a1.key_place() && **s != a2.key_place())
                        .cloned()
                        .collect();
                    let sync = TransitionName::sync(a1.clone(), a2.clone());
                    post.insert(sync.key_place());
                    syncs.push((sync, pre, post));
                }
            }
            let mut out = left.union(right);
            for (t, pre, post) in syncs {
                out.places.insert(t.key_place());
                out.transitions.push((t, pre, post));
            }
            Ok(out)
        }
        Process::Restrict(body, c) => {
            let inner = build(body)?;
            let (hidden, kept): (Vec<_>, Vec<_>) =
                inner.transitions.into_iter().partition(|(t, _, _)| t.label().blocked_by(c));
            let hidden_keys: BTreeSet<PlaceName> = hidden.iter().map(|(t, _, _)| t.key_place()).collect();
            let places = inner.places.difference(&hidden_keys).cloned().collect();
            Ok(Parts { places, transitions: kept, initial: inner.initial }.decorate(&Decoration::Restr(c.clone())))
        }
        Process::Rec(..) | Process::Var(_) => Err(ComposeError::Recursive),
    }
}
