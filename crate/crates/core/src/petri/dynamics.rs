use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec::Vec;
use core::fmt;

use super::{DirectedTransition, FiniteNet, Marking, Net};

/// A multiset of fired transitions.
pub type Execution<T> = BTreeMap<DirectedTransition<T>, usize>;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FireError<P: fmt::Debug, T: fmt::Debug> {
    #[error("transition {transition:?} is not part of the truncation at this marking")]
    Unknown { transition: DirectedTransition<T> },
    #[error("transition {transition:?} is not enabled, missing {missing:?}")]
    NotEnabled { transition: DirectedTransition<T>, missing: BTreeSet<P> },
    #[error("firing {transition:?} puts a second token on {places:?}")]
    Unsafe { transition: DirectedTransition<T>, marking: Marking<P>, places: BTreeSet<P> },
}

/// The result of firing in `N`.
pub type Firing<N, R> = Result<R, FireError<<N as Net>::Place, <N as Net>::Trans>>;

/// Transitions whose preset is contained in `m`.
pub fn enabled<N: Net>(n: &N, m: &Marking<N::Place>) -> BTreeSet<DirectedTransition<N::Trans>> {
    let net = n.truncate(m);
    net.transitions().filter(|(_, arcs)| arcs.preset.is_subset(m)).map(|(t, _)| t.clone()).collect()
}

/// Fire `t` at `m`.
pub fn fire<N: Net>(n: &N, m: &Marking<N::Place>, t: &DirectedTransition<N::Trans>) -> Firing<N, Marking<N::Place>>
where
    N::Place: fmt::Debug,
{
    let net = n.truncate(m);
    fire_in(&net, m, t)
}

pub(crate) fn fire_in<P: Ord + Clone + fmt::Debug, T: Ord + Clone + fmt::Debug>(
    net: &FiniteNet<P, T>,
    m: &Marking<P>,
    t: &DirectedTransition<T>,
) -> Result<Marking<P>, FireError<P, T>> {
    let arcs = net.arcs(t).ok_or_else(|| FireError::Unknown { transition: t.clone() })?;
    let missing: BTreeSet<P> = arcs.preset.difference(m).cloned().collect();
    if !missing.is_empty() {
        return Err(FireError::NotEnabled { transition: t.clone(), missing });
    }
    let mut next: Marking<P> = m.difference(&arcs.preset).cloned().collect();
    let clash: BTreeSet<P> = arcs.postset.intersection(&next).cloned().collect();
    if !clash.is_empty() {
        return Err(FireError::Unsafe { transition: t.clone(), marking: m.clone(), places: clash });
    }
    next.extend(arcs.postset.iter().cloned());
    Ok(next)
}

type Step<N> = (DirectedTransition<<N as Net>::Trans>, Marking<<N as Net>::Place>);

fn successors<N: Net>(n: &N, m: &Marking<N::Place>) -> Firing<N, Vec<Step<N>>>
where
    N::Place: fmt::Debug,
{
    let net = n.truncate(m);
    net.transitions()
        .filter(|(_, arcs)| arcs.preset.is_subset(m))
        .map(|(t, _)| fire_in(&net, m, t).map(|next| (t.clone(), next)))
        .collect()
}

/// All firing sequences of length at most `depth` from the initial marking,
/// including the empty one.
pub fn firing_sequences<N: Net>(n: &N, depth: usize) -> Firing<N, BTreeSet<Vec<DirectedTransition<N::Trans>>>>
where
    N::Place: fmt::Debug,
{
    let mut out = BTreeSet::new();
    let mut stack = alloc::vec![(n.initial_marking().into_owned(), Vec::new())];
    while let Some((m, seq)) = stack.pop() {
        if seq.len() < depth {
            for (t, next) in successors(n, &m)? {
                let mut longer = seq.clone();
                longer.push(t);
                stack.push((next, longer));
            }
        }
        out.insert(seq);
    }
    Ok(out)
}

/// The executions of all firing sequences of length at most `depth`.
pub fn executions<N: Net>(n: &N, depth: usize) -> Firing<N, BTreeSet<Execution<N::Trans>>>
where
    N::Place: fmt::Debug,
{
    let start = (n.initial_marking().into_owned(), Execution::new());
    let mut seen = BTreeSet::new();
    seen.insert(start.clone());
    let mut frontier = alloc::vec![start];
    for _ in 0..depth {
        let mut next_frontier = Vec::new();
        for (m, x) in &frontier {
            for (t, next) in successors(n, m)? {
                let mut y = x.clone();
                *y.entry(t).or_insert(0) += 1;
                let state = (next, y);
                if seen.insert(state.clone()) {
                    next_frontier.push(state);
                }
            }
        }
        frontier = next_frontier;
    }
    Ok(seen.into_iter().map(|(_, x)| x).collect())
}

/// Markings reachable in at most `depth` firings.
pub fn reachable_markings<N: Net>(n: &N, depth: usize) -> Firing<N, BTreeSet<Marking<N::Place>>>
where
    N::Place: fmt::Debug,
{
    let mut seen = BTreeSet::new();
    let start = n.initial_marking().into_owned();
    seen.insert(start.clone());
    let mut queue = VecDeque::from([(start, 0usize)]);
    while let Some((m, d)) = queue.pop_front() {
        if d == depth {
            continue;
        }
        for (_, next) in successors(n, &m)? {
            if seen.insert(next.clone()) {
                queue.push_back((next, d + 1));
            }
        }
    }
    Ok(seen)
}

/// Checks that no firing within `depth` steps puts two tokens in a place.
pub fn is_safe<N: Net>(n: &N, depth: usize) -> Firing<N, ()>
where
    N::Place: fmt::Debug,
{
    reachable_markings(n, depth).map(|_| ())
}

/// The union of the truncations at every marking reachable within `depth`.
pub fn explore<N: Net>(n: &N, depth: usize) -> Firing<N, FiniteNet<N::Place, N::Trans>>
where
    N::Place: fmt::Debug,
{
    let markings = reachable_markings(n, depth)?;
    let mut union = FiniteNet::new(n.initial_marking().into_owned());
    for m in &markings {
        union.merge(&n.truncate(m)).expect("truncations of one net agree on shared transitions");
    }
    Ok(union)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::petri::{DirectedTransition as D, FiniteNet};

    fn set(xs: &[&'static str]) -> BTreeSet<&'static str> {
        xs.iter().copied().collect()
    }

    fn diamond() -> FiniteNet<&'static str, &'static str> {
        let mut n = FiniteNet::new(set(&["p", "q"]));
        n.add_transition(D::fwd("a"), set(&["p"]), set(&["p2"])).unwrap();
        n.add_transition(D::fwd("b"), set(&["q"]), set(&["q2"])).unwrap();
        n
    }

    #[test]
    fn fire_moves_tokens() {
        let n = diamond();
        let m = fire(&n, n.initial(), &D::fwd("a")).unwrap();
        assert_eq!(m, set(&["p2", "q"]));
        assert!(matches!(fire(&n, &m, &D::fwd("a")), Err(FireError::NotEnabled { .. })));
        assert!(matches!(fire(&n, &m, &D::fwd("c")), Err(FireError::Unknown { .. })));
    }

    #[test]
    fn interleavings_and_executions() {
        let n = diamond();
        assert_eq!(firing_sequences(&n, 2).unwrap().len(), 5);
        assert_eq!(executions(&n, 2).unwrap().len(), 4);
        assert_eq!(reachable_markings(&n, 2).unwrap().len(), 4);
    }

    #[test]
    fn unsafe_firing_is_detected() {
        let mut n = FiniteNet::new(set(&["p", "q"]));
        n.add_transition(D::fwd("a"), set(&["p"]), set(&["q"])).unwrap();
        assert!(matches!(is_safe(&n, 1), Err(FireError::Unsafe { .. })));
    }

    #[test]
    fn empty_presets_are_rejected() {
        let mut n: FiniteNet<&str, &str> = FiniteNet::new(BTreeSet::new());
        assert!(n.add_transition(D::fwd("a"), BTreeSet::new(), set(&["q"])).is_err());
    }
}
