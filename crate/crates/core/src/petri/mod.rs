//! Safe Petri nets over arbitrary place and transition names.
//!
//! Markings are sets. A [`FiniteNet`] lists its transitions explicitly; a
//! [`LazyNet`] produces the finite truncation relevant to a marking on demand.

mod dynamics;

use alloc::borrow::Cow;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::sync::Arc;
use core::fmt;

pub(crate) use dynamics::fire_in;
pub use dynamics::{
    enabled, executions, explore, fire, firing_sequences, is_safe, reachable_markings, Execution, FireError,
};

pub type Marking<P> = BTreeSet<P>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Fwd,
    Bwd,
}

impl Direction {
    pub fn arrow(self) -> &'static str {
        match self {
            Direction::Fwd => "->",
            Direction::Bwd => "<-",
        }
    }

    pub fn flip(self) -> Direction {
        match self {
            Direction::Fwd => Direction::Bwd,
            Direction::Bwd => Direction::Fwd,
        }
    }
}

/// A transition tagged with the direction it executes in.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DirectedTransition<T> {
    pub name: T,
    pub direction: Direction,
}

impl<T> DirectedTransition<T> {
    pub fn fwd(name: T) -> Self {
        DirectedTransition { name, direction: Direction::Fwd }
    }

    pub fn bwd(name: T) -> Self {
        DirectedTransition { name, direction: Direction::Bwd }
    }

    pub fn is_fwd(&self) -> bool {
        self.direction == Direction::Fwd
    }
}

impl<T: Clone> DirectedTransition<T> {
    pub fn reversed(&self) -> Self {
        DirectedTransition { name: self.name.clone(), direction: self.direction.flip() }
    }
}

impl<T: fmt::Display> fmt::Display for DirectedTransition<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.direction.arrow(), self.name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arcs<P: Ord> {
    pub preset: BTreeSet<P>,
    pub postset: BTreeSet<P>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum NetError<T: fmt::Debug> {
    #[error("transition {0:?} has an empty preset")]
    EmptyPreset(DirectedTransition<T>),
    #[error("transition {0:?} is declared twice with different arcs")]
    ConflictingArcs(DirectedTransition<T>),
    #[error("transition {0:?} is not part of the net")]
    UnknownTransition(DirectedTransition<T>),
}

/// A finite safe net with an explicit transition table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteNet<P: Ord, T: Ord> {
    places: BTreeSet<P>,
    transitions: BTreeMap<DirectedTransition<T>, Arcs<P>>,
    initial: Marking<P>,
}

impl<P: Ord + Clone, T: Ord + Clone + fmt::Debug> FiniteNet<P, T> {
    pub fn new(initial: Marking<P>) -> Self {
        FiniteNet { places: initial.clone(), transitions: BTreeMap::new(), initial }
    }

    pub fn add_place(&mut self, p: P) {
        self.places.insert(p);
    }

    /// Declare a transition; its endpoints become places of the net.
    /// Re-declaring with identical arcs is a no-op.
    pub fn add_transition(
        &mut self,
        t: DirectedTransition<T>,
        preset: BTreeSet<P>,
        postset: BTreeSet<P>,
    ) -> Result<(), NetError<T>> {
        if preset.is_empty() {
            return Err(NetError::EmptyPreset(t));
        }
        if let Some(existing) = self.transitions.get(&t) {
            if existing.preset != preset || existing.postset != postset {
                return Err(NetError::ConflictingArcs(t));
            }
            return Ok(());
        }
        self.places.extend(preset.iter().cloned());
        self.places.extend(postset.iter().cloned());
        self.transitions.insert(t, Arcs { preset, postset });
        Ok(())
    }

    pub fn places(&self) -> &BTreeSet<P> {
        &self.places
    }

    pub fn transitions(&self) -> impl Iterator<Item = (&DirectedTransition<T>, &Arcs<P>)> {
        self.transitions.iter()
    }

    pub fn transition_names(&self) -> BTreeSet<DirectedTransition<T>> {
        self.transitions.keys().cloned().collect()
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn arcs(&self, t: &DirectedTransition<T>) -> Option<&Arcs<P>> {
        self.transitions.get(t)
    }

    pub fn initial(&self) -> &Marking<P> {
        &self.initial
    }

    pub fn with_initial(mut self, m: Marking<P>) -> Self {
        self.places.extend(m.iter().cloned());
        self.initial = m;
        self
    }

    /// Transitions producing into `p`.
    pub fn producers(&self, p: &P) -> BTreeSet<DirectedTransition<T>> {
        self.transitions.iter().filter(|(_, arcs)| arcs.postset.contains(p)).map(|(t, _)| t.clone()).collect()
    }

    /// Transitions consuming from `p`.
    pub fn consumers(&self, p: &P) -> BTreeSet<DirectedTransition<T>> {
        self.transitions.iter().filter(|(_, arcs)| arcs.preset.contains(p)).map(|(t, _)| t.clone()).collect()
    }

    /// Union of two nets. Both must agree on shared transitions.
    pub fn merge(&mut self, other: &FiniteNet<P, T>) -> Result<(), NetError<T>> {
        for (t, arcs) in &other.transitions {
            self.add_transition(t.clone(), arcs.preset.clone(), arcs.postset.clone())?;
        }
        self.places.extend(other.places.iter().cloned());
        Ok(())
    }

    /// The forward transitions only, as a net.
    pub fn forward_part(&self) -> FiniteNet<P, T> {
        let forward: BTreeSet<_> = self.transitions.keys().filter(|t| t.is_fwd()).cloned().collect();
        let mut net = FiniteNet::new(self.initial.clone());
        net.places = self.places.clone();
        for t in forward {
            net.transitions.insert(t.clone(), self.transitions[&t].clone());
        }
        net
    }

    /// The subnet generated by `ts`: those transitions, the places around
    /// them, and the initial marking restricted to these places.
    pub fn subnet(&self, ts: &BTreeSet<DirectedTransition<T>>) -> Result<FiniteNet<P, T>, NetError<T>> {
        let mut places = BTreeSet::new();
        let mut transitions = BTreeMap::new();
        for t in ts {
            let arcs = self.transitions.get(t).ok_or_else(|| NetError::UnknownTransition(t.clone()))?;
            places.extend(arcs.preset.iter().cloned());
            places.extend(arcs.postset.iter().cloned());
            transitions.insert(t.clone(), arcs.clone());
        }
        let initial = self.initial.intersection(&places).cloned().collect();
        Ok(FiniteNet { places, transitions, initial })
    }
}

/// Access to the part of a possibly infinite net that matters at a marking.
pub trait Net {
    type Place: Ord + Clone;
    type Trans: Ord + Clone + fmt::Debug;

    fn initial_marking(&self) -> Cow<'_, Marking<Self::Place>>;

    /// A finite net containing at least every transition enabled at `m`.
    fn truncate(&self, m: &Marking<Self::Place>) -> Cow<'_, FiniteNet<Self::Place, Self::Trans>>;
}

impl<P: Ord + Clone, T: Ord + Clone + fmt::Debug> Net for FiniteNet<P, T> {
    type Place = P;
    type Trans = T;

    fn initial_marking(&self) -> Cow<'_, Marking<P>> {
        Cow::Borrowed(&self.initial)
    }

    fn truncate(&self, _m: &Marking<P>) -> Cow<'_, FiniteNet<P, T>> {
        Cow::Borrowed(self)
    }
}

type Generator<P, T> = dyn Fn(&Marking<P>) -> FiniteNet<P, T> + Send + Sync;

/// A net given by its initial marking and a truncation function.
#[derive(Clone)]
pub struct LazyNet<P: Ord, T: Ord> {
    initial: Marking<P>,
    generator: Arc<Generator<P, T>>,
}

impl<P: Ord + Clone + fmt::Debug + 'static, T: Ord + Clone + fmt::Debug + 'static> LazyNet<P, T> {
    pub fn new(
        initial: Marking<P>,
        generator: impl Fn(&Marking<P>) -> FiniteNet<P, T> + Send + Sync + 'static,
    ) -> Self {
        LazyNet { initial, generator: Arc::new(generator) }
    }

    pub fn initial(&self) -> &Marking<P> {
        &self.initial
    }

    pub fn with_initial(&self, m: Marking<P>) -> Self {
        LazyNet { initial: m, generator: self.generator.clone() }
    }

    /// Add backward copies of the forward transitions selected by `reversible`.
    ///
    /// Completeness is not checked here; use [`crate::unravel::reverse`] on
    /// finite nets for a checked variant.
    pub fn reversed(&self, reversible: impl Fn(&T) -> bool + Send + Sync + 'static) -> Self
    where
        P: Send + Sync,
        T: Send + Sync,
    {
        let inner = self.generator.clone();
        LazyNet::new(self.initial.clone(), move |m| {
            crate::unravel::reverse_unchecked(&inner(m), &|t: &T| reversible(t))
        })
    }
}

impl<P: Ord + Clone, T: Ord + Clone + fmt::Debug> Net for LazyNet<P, T> {
    type Place = P;
    type Trans = T;

    fn initial_marking(&self) -> Cow<'_, Marking<P>> {
        Cow::Borrowed(&self.initial)
    }

    fn truncate(&self, m: &Marking<P>) -> Cow<'_, FiniteNet<P, T>> {
        Cow::Owned((self.generator)(m))
    }
}

impl<P: Ord + fmt::Debug, T: Ord> fmt::Debug for LazyNet<P, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LazyNet").field("initial", &self.initial).finish_non_exhaustive()
    }
}
