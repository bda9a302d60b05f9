//! Structural checks for causal, unravel, complete and reversible unravel
//! nets, and the reversal construction.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::names::render_set;
use crate::petri::{executions, explore, fire_in, is_safe, DirectedTransition, Execution, FiniteNet, FireError, Net};

type Dt<T> = DirectedTransition<T>;

/// Why a net fails one of the structural properties.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation<P: Ord + fmt::Debug, T: Ord + fmt::Debug> {
    /// A place with more than one producer.
    BackwardConflict {
        place: P,
        producers: BTreeSet<Dt<T>>,
    },
    /// A place with more than one consumer.
    ForwardConflict {
        place: P,
        consumers: BTreeSet<Dt<T>>,
    },
    /// The flow relation has a cycle through this transition.
    Cycle {
        transition: Dt<T>,
    },
    /// Not every transition can fire once; these never become enabled.
    NotExecutable {
        stuck: BTreeSet<Dt<T>>,
    },
    /// A place without producers that is not initially marked.
    UnmarkedSource {
        place: P,
    },
    Unsafe(FireError<P, T>),
    /// The subnet of an execution is not a causal net.
    NonCausalExecution {
        execution: Execution<T>,
        cause: Box<Violation<P, T>>,
    },
    /// Two distinct transitions with equal presets and postsets.
    IndistinguishableTransitions {
        first: Dt<T>,
        second: Dt<T>,
    },
    /// A forward transition with no key place.
    MissingKeyPlace {
        transition: Dt<T>,
    },
    /// A backward transition that does not swap the arcs of its forward twin.
    UnmatchedReverse {
        transition: Dt<T>,
    },
}

impl<P: Ord + fmt::Debug, T: Ord + fmt::Debug> Violation<P, T> {
    /// Short identifier of the violated condition.
    pub fn condition(&self) -> &'static str {
        match self {
            Violation::BackwardConflict { .. } => "causal: place with several producers",
            Violation::ForwardConflict { .. } => "causal: place with several consumers",
            Violation::Cycle { .. } => "causal: cyclic flow",
            Violation::NotExecutable { .. } => "causal: transitions not executable",
            Violation::UnmarkedSource { .. } => "causal: unmarked place without producer",
            Violation::Unsafe(_) => "safety",
            Violation::NonCausalExecution { .. } => "unravel: execution subnet not causal",
            Violation::IndistinguishableTransitions { .. } => "unravel: transitions with equal pre and post sets",
            Violation::MissingKeyPlace { .. } => "complete: missing key place",
            Violation::UnmatchedReverse { .. } => "reversible: backward transition without forward twin",
        }
    }
}

impl<P: Ord + fmt::Debug + fmt::Display, T: Ord + fmt::Debug + fmt::Display> Violation<P, T> {
    /// Human-readable witness using the names' display forms.
    pub fn witness(&self) -> String {
        match self {
            Violation::BackwardConflict { place, producers } => {
                format!("{place} produced by {}", render_set(producers))
            }
            Violation::ForwardConflict { place, consumers } => format!("{place} consumed by {}", render_set(consumers)),
            Violation::Cycle { transition } => format!("cycle through {transition}"),
            Violation::NotExecutable { stuck } => format!("never enabled: {}", render_set(stuck)),
            Violation::UnmarkedSource { place } => format!("{place}"),
            Violation::Unsafe(FireError::Unsafe { transition, marking, places }) => {
                format!("{transition} at {} marks {} twice", render_set(marking), render_set(places))
            }
            Violation::Unsafe(e) => format!("{e:?}"),
            Violation::NonCausalExecution { execution, cause } => {
                let parts: Vec<String> = execution.iter().map(|(t, k)| format!("{t}x{k}")).collect();
                format!("execution {{{}}}: {}: {}", parts.join(", "), cause.condition(), cause.witness())
            }
            Violation::IndistinguishableTransitions { first, second } => format!("{first} and {second}"),
            Violation::MissingKeyPlace { transition } => format!("{transition}"),
            Violation::UnmatchedReverse { transition } => format!("{transition}"),
        }
    }
}

impl<P: Ord + fmt::Debug, T: Ord + fmt::Debug> From<FireError<P, T>> for Violation<P, T> {
    fn from(e: FireError<P, T>) -> Self {
        Violation::Unsafe(e)
    }
}

/// Causal net check: no place branches, the flow is acyclic, all
/// transitions fire together, and sources are marked.
pub fn is_causal_net<P, T>(n: &FiniteNet<P, T>) -> Result<(), Violation<P, T>>
where
    P: Ord + Clone + fmt::Debug,
    T: Ord + Clone + fmt::Debug,
{
    let mut producers: BTreeMap<&P, BTreeSet<Dt<T>>> = BTreeMap::new();
    let mut consumers: BTreeMap<&P, BTreeSet<Dt<T>>> = BTreeMap::new();
    for (t, arcs) in n.transitions() {
        for p in &arcs.postset {
            producers.entry(p).or_default().insert(t.clone());
        }
        for p in &arcs.preset {
            consumers.entry(p).or_default().insert(t.clone());
        }
    }
    for (place, ts) in &producers {
        if ts.len() > 1 {
            return Err(Violation::BackwardConflict { place: (*place).clone(), producers: ts.clone() });
        }
    }
    for (place, ts) in &consumers {
        if ts.len() > 1 {
            return Err(Violation::ForwardConflict { place: (*place).clone(), consumers: ts.clone() });
        }
    }
    for p in n.places() {
        if !producers.contains_key(p) && !n.initial().contains(p) {
            return Err(Violation::UnmarkedSource { place: p.clone() });
        }
    }
    check_acyclic(n)?;
    let mut marking = n.initial().clone();
    let mut pending: BTreeSet<Dt<T>> = n.transition_names();
    loop {
        let ready = pending.iter().find(|t| n.arcs(t).is_some_and(|a| a.preset.is_subset(&marking))).cloned();
        match ready {
            Some(t) => {
                marking = fire_in(n, &marking, &t)?;
                pending.remove(&t);
            }
            None if pending.is_empty() => return Ok(()),
            None => return Err(Violation::NotExecutable { stuck: pending }),
        }
    }
}

fn check_acyclic<P, T>(n: &FiniteNet<P, T>) -> Result<(), Violation<P, T>>
where
    P: Ord + Clone + fmt::Debug,
    T: Ord + Clone + fmt::Debug,
{
    let names: Vec<Dt<T>> = n.transition_names().into_iter().collect();
    let index: BTreeMap<&Dt<T>, usize> = names.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut successors = alloc::vec![BTreeSet::new(); names.len()];
    let mut indegree = alloc::vec![0usize; names.len()];
    for (t, arcs) in n.transitions() {
        for (u, other) in n.transitions() {
            if !arcs.postset.is_disjoint(&other.preset) && successors[index[t]].insert(index[u]) {
                indegree[index[u]] += 1;
            }
        }
    }
    let mut queue: Vec<usize> = (0..names.len()).filter(|&i| indegree[i] == 0).collect();
    let mut visited = 0;
    while let Some(i) = queue.pop() {
        visited += 1;
        for &j in &successors[i] {
            indegree[j] -= 1;
            if indegree[j] == 0 {
                queue.push(j);
            }
        }
    }
    if visited == names.len() {
        Ok(())
    } else {
        let stuck = (0..names.len()).find(|&i| indegree[i] > 0).expect("a node on or after a cycle");
        Err(Violation::Cycle { transition: names[stuck].clone() })
    }
}

/// Unravel net check up to `depth`: safety, causality of every execution's
/// subnet, and distinguishable transitions.
pub fn is_unravel_net<N: Net>(n: &N, depth: usize) -> Result<(), Violation<N::Place, N::Trans>>
where
    N::Place: fmt::Debug,
{
    let net = explore(n, depth)?;
    check_distinguishable(&net)?;
    for x in executions(n, depth)? {
        let support: BTreeSet<_> = x.keys().cloned().collect();
        let sub = net.subnet(&support).expect("executed transitions belong to the explored net");
        if let Err(cause) = is_causal_net(&sub) {
            return Err(Violation::NonCausalExecution { execution: x, cause: Box::new(cause) });
        }
    }
    Ok(())
}

fn check_distinguishable<P, T>(net: &FiniteNet<P, T>) -> Result<(), Violation<P, T>>
where
    P: Ord + Clone + fmt::Debug,
    T: Ord + Clone + fmt::Debug,
{
    let mut seen: BTreeMap<(&BTreeSet<P>, &BTreeSet<P>), &Dt<T>> = BTreeMap::new();
    for (t, arcs) in net.transitions() {
        if let Some(first) = seen.insert((&arcs.preset, &arcs.postset), t) {
            return Err(Violation::IndistinguishableTransitions { first: first.clone(), second: t.clone() });
        }
    }
    Ok(())
}

/// The key place of each forward transition: a place only it produces,
/// nobody consumes, in a postset with at least two places. Places that sort
/// first are preferred.
pub fn key_places<P, T>(n: &FiniteNet<P, T>) -> Result<BTreeMap<Dt<T>, P>, Violation<P, T>>
where
    P: Ord + Clone + fmt::Debug,
    T: Ord + Clone + fmt::Debug,
{
    let forward = n.forward_part();
    let mut out = BTreeMap::new();
    for (t, arcs) in forward.transitions() {
        let key = if arcs.postset.len() > 1 {
            arcs.postset.iter().find(|s| {
                let producers = forward.producers(s);
                producers.len() == 1 && producers.contains(t) && forward.consumers(s).is_empty()
            })
        } else {
            None
        };
        match key {
            Some(s) => out.insert(t.clone(), s.clone()),
            None => return Err(Violation::MissingKeyPlace { transition: t.clone() }),
        };
    }
    Ok(out)
}

/// Complete unravel net check up to `depth`.
pub fn is_complete_unravel_net<P, T>(n: &FiniteNet<P, T>, depth: usize) -> Result<(), Violation<P, T>>
where
    P: Ord + Clone + fmt::Debug,
    T: Ord + Clone + fmt::Debug,
{
    is_unravel_net(n, depth)?;
    key_places(n).map(|_| ())
}

/// Add a backward transition for every forward transition selected by
/// `reversible`, with preset and postset swapped. The net must be complete.
pub fn reverse<P, T>(n: &FiniteNet<P, T>, reversible: &dyn Fn(&T) -> bool) -> Result<FiniteNet<P, T>, Violation<P, T>>
where
    P: Ord + Clone + fmt::Debug,
    T: Ord + Clone + fmt::Debug,
{
    key_places(n)?;
    Ok(reverse_unchecked(n, reversible))
}

/// [`reverse`] without the completeness check.
pub fn reverse_unchecked<P, T>(n: &FiniteNet<P, T>, reversible: &dyn Fn(&T) -> bool) -> FiniteNet<P, T>
where
    P: Ord + Clone + fmt::Debug,
    T: Ord + Clone + fmt::Debug,
{
    let mut out = n.clone();
    for (t, arcs) in n.transitions() {
        if t.is_fwd() && reversible(&t.name) {
            out.add_transition(t.reversed(), arcs.postset.clone(), arcs.preset.clone())
                .expect("forward transitions have non-empty postsets in complete nets");
        }
    }
    out
}

/// Reversible unravel net check up to `depth`. Backward transitions are the
/// reversing ones.
pub fn is_reversible_unravel<N: Net>(n: &N, depth: usize) -> Result<(), Violation<N::Place, N::Trans>>
where
    N::Place: fmt::Debug,
{
    let net = explore(n, depth)?;
    for (t, arcs) in net.transitions().filter(|(t, _)| !t.is_fwd()) {
        let twin = net.arcs(&t.reversed());
        if twin.is_none_or(|fwd| fwd.preset != arcs.postset || fwd.postset != arcs.preset) {
            return Err(Violation::UnmatchedReverse { transition: t.clone() });
        }
    }
    let forward = net.forward_part();
    is_unravel_net(&forward, depth)?;
    key_places(&forward)?;
    is_safe(n, depth)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::petri::{fire, reachable_markings, DirectedTransition as D};

    fn set(xs: &[&'static str]) -> BTreeSet<&'static str> {
        xs.iter().copied().collect()
    }

    /// Two conflicting transitions a and b share p2 and both feed p4, which c consumes.
    fn conflict_net(complete: bool) -> FiniteNet<&'static str, &'static str> {
        let mut n = FiniteNet::new(set(&["p1", "p2", "p3"]));
        let key = |k: &'static str| if complete { set(&[k]) } else { BTreeSet::new() };
        let post = |base: &[&'static str], k: &'static str| -> BTreeSet<&'static str> {
            set(base).union(&key(k)).copied().collect()
        };
        n.add_transition(D::fwd("a"), set(&["p1", "p2"]), post(&["p4"], "p6")).unwrap();
        n.add_transition(D::fwd("b"), set(&["p2", "p3"]), post(&["p4"], "p7")).unwrap();
        n.add_transition(D::fwd("c"), set(&["p4"]), post(&["p5"], "p8")).unwrap();
        n
    }

    #[test]
    fn conflict_net_is_unravel_but_not_causal() {
        let n = conflict_net(false);
        assert!(is_unravel_net(&n, 5).is_ok());
        assert!(matches!(is_causal_net(&n), Err(Violation::BackwardConflict { place: "p4", .. })));
        assert!(matches!(key_places(&n), Err(Violation::MissingKeyPlace { .. })));
        assert!(reverse(&n, &|_| true).is_err());
    }

    #[test]
    fn completed_net_reverses() {
        let n = conflict_net(true);
        let keys = key_places(&n).unwrap();
        assert_eq!(keys[&D::fwd("a")], "p6");
        let rev = reverse(&n, &|_| true).unwrap();
        assert_eq!(rev.transition_count(), 6);
        assert!(is_reversible_unravel(&rev, 6).is_ok());
        assert_eq!(reachable_markings(&rev, 6).unwrap(), reachable_markings(&n, 6).unwrap());
        let m = fire(&rev, rev.initial(), &D::fwd("a")).unwrap();
        let m = fire(&rev, &m, &D::fwd("c")).unwrap();
        assert_eq!(m, set(&["p3", "p5", "p6", "p8"]));
        let back = fire(&rev, &m, &D::bwd("c")).unwrap();
        assert_eq!(fire(&rev, &back, &D::bwd("a")).unwrap(), *rev.initial());
    }

    #[test]
    fn partial_reversal() {
        let n = conflict_net(true);
        let rev = reverse(&n, &|t| *t == "c").unwrap();
        assert_eq!(rev.transition_count(), 4);
        assert!(rev.arcs(&D::bwd("c")).is_some());
    }

    #[test]
    fn cycles_are_rejected() {
        let mut n = FiniteNet::new(set(&["p"]));
        n.add_transition(D::fwd("a"), set(&["p"]), set(&["q"])).unwrap();
        n.add_transition(D::fwd("b"), set(&["q"]), set(&["p"])).unwrap();
        assert!(is_causal_net(&n).is_err());
        assert!(matches!(is_unravel_net(&n, 3), Err(Violation::NonCausalExecution { .. })));
    }

    #[test]
    fn unmarked_sources_are_rejected() {
        let mut n = FiniteNet::new(set(&["p"]));
        n.add_transition(D::fwd("a"), set(&["p", "r"]), set(&["q"])).unwrap();
        assert_eq!(is_causal_net(&n), Err(Violation::UnmarkedSource { place: "r" }));
    }

    #[test]
    fn indistinguishable_transitions_are_rejected() {
        let mut n = FiniteNet::new(set(&["p"]));
        n.add_transition(D::fwd("a"), set(&["p"]), set(&["q"])).unwrap();
        n.add_transition(D::fwd("b"), set(&["p"]), set(&["q"])).unwrap();
        assert!(matches!(is_unravel_net(&n, 2), Err(Violation::IndistinguishableTransitions { .. })));
    }

    #[test]
    fn subnet_restricts_marking() {
        let n = conflict_net(true);
        let sub = n.subnet(&[D::fwd("b")].into_iter().collect()).unwrap();
        assert_eq!(*sub.initial(), set(&["p2", "p3"]));
        assert!(is_causal_net(&sub).is_ok());
    }
}
