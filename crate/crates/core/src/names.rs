//! Structured names of the places and transitions produced by the encoding.
//!
//! A name is a path of decorations applied to a residual process, an action
//! or a pair of synchronising components.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::ccs::{Action, Channel, Process};

/// One step of a path through a process term.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Decoration {
    /// Left (`0`) or right (`1`) side of a parallel composition.
    Par(u8),
    /// Branch of an n-ary choice with at least two branches.
    Sum(usize),
    /// Continuation of a prefix that has been executed.
    Past(Action),
    /// Body of a restriction.
    Restr(Channel),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path(pub Vec<Decoration>);

impl Path {
    pub fn root() -> Path {
        Path(Vec::new())
    }

    pub fn child(&self, d: Decoration) -> Path {
        let mut v = self.0.clone();
        v.push(d);
        Path(v)
    }

    pub fn prepend(&self, d: Decoration) -> Path {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(d);
        v.extend(self.0.iter().cloned());
        Path(v)
    }

    pub fn decorations(&self) -> &[Decoration] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<&Decoration> {
        self.0.last()
    }

    pub fn parent(&self) -> Path {
        let mut v = self.0.clone();
        v.pop();
        Path(v)
    }

    pub fn without_restrictions(&self) -> Path {
        Path(self.0.iter().filter(|d| !matches!(d, Decoration::Restr(_))).cloned().collect())
    }

    pub fn restricts(&self, channel: &Channel) -> bool {
        self.0.iter().any(|d| matches!(d, Decoration::Restr(c) if c == channel))
    }

    fn write_with(
        &self,
        f: &mut fmt::Formatter<'_>,
        leaf: &dyn Fn(&mut fmt::Formatter<'_>) -> fmt::Result,
    ) -> fmt::Result {
        write_decorations(f, &self.0, leaf)
    }
}

fn write_decorations(
    f: &mut fmt::Formatter<'_>,
    decorations: &[Decoration],
    leaf: &dyn Fn(&mut fmt::Formatter<'_>) -> fmt::Result,
) -> fmt::Result {
    let Some((first, rest)) = decorations.split_first() else {
        return leaf(f);
    };
    match first {
        Decoration::Par(i) => write!(f, "|{i}:")?,
        Decoration::Sum(i) => write!(f, "+{i}:")?,
        Decoration::Past(a) => write!(f, "^{a}.")?,
        Decoration::Restr(c) => {
            f.write_str("(")?;
            write_decorations(f, rest, leaf)?;
            return write!(f, ")\\{c}");
        }
    }
    write_decorations(f, rest, leaf)
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_with(f, &|_| Ok(()))
    }
}

/// A transition executing the prefix `action` located at `path`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActName {
    pub path: Path,
    pub action: Action,
}

impl ActName {
    pub fn new(path: Path, action: Action) -> ActName {
        ActName { path, action }
    }

    /// The key place this transition produces when it fires on its own.
    pub fn key_place(&self) -> PlaceName {
        PlaceName::Key { path: self.path.child(Decoration::Past(self.action.clone())), action: self.action.clone() }
    }

    fn decorate(&self, d: &Decoration) -> ActName {
        ActName { path: self.path.prepend(d.clone()), action: self.action.clone() }
    }
}

impl fmt::Display for ActName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.path.write_with(f, &|f| write!(f, "{}", self.action))
    }
}

/// Two synchronising components, ordered by their rendered names.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SyncPair {
    first: ActName,
    second: ActName,
}

impl SyncPair {
    pub fn new(a: ActName, b: ActName) -> SyncPair {
        if a.to_string() <= b.to_string() {
            SyncPair { first: a, second: b }
        } else {
            SyncPair { first: b, second: a }
        }
    }

    pub fn components(&self) -> (&ActName, &ActName) {
        (&self.first, &self.second)
    }

    fn decorate(&self, d: &Decoration) -> SyncPair {
        SyncPair::new(self.first.decorate(d), self.second.decorate(d))
    }
}

impl fmt::Display for SyncPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*{}", self.first, self.second)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TransitionName {
    Act(ActName),
    Sync(SyncPair),
}

impl TransitionName {
    pub fn act(path: Path, action: Action) -> TransitionName {
        TransitionName::Act(ActName::new(path, action))
    }

    pub fn sync(a: ActName, b: ActName) -> TransitionName {
        TransitionName::Sync(SyncPair::new(a, b))
    }

    pub fn label(&self) -> Action {
        match self {
            TransitionName::Act(t) => t.action.clone(),
            TransitionName::Sync(_) => Action::Tau,
        }
    }

    pub fn key_place(&self) -> PlaceName {
        match self {
            TransitionName::Act(t) => t.key_place(),
            TransitionName::Sync(pair) => PlaceName::SyncKey(pair.clone()),
        }
    }

    /// Prefix every component path with `d`.
    pub fn decorate(&self, d: &Decoration) -> TransitionName {
        match self {
            TransitionName::Act(t) => TransitionName::Act(t.decorate(d)),
            TransitionName::Sync(pair) => TransitionName::Sync(pair.decorate(d)),
        }
    }
}

impl fmt::Display for TransitionName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransitionName::Act(t) => t.fmt(f),
            TransitionName::Sync(pair) => pair.fmt(f),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PlaceName {
    /// The key place of the transition executing `action`; `path` ends in `Past(action)`.
    Key { path: Path, action: Action },
    /// The key place of a synchronisation.
    SyncKey(SyncPair),
    /// A place holding the residual process at `path`: `0` or a single prefix.
    Proc { path: Path, residual: Process },
}

impl PlaceName {
    pub fn proc(path: Path, residual: Process) -> PlaceName {
        PlaceName::Proc { path, residual }
    }

    pub fn is_key(&self) -> bool {
        !matches!(self, PlaceName::Proc { .. })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            PlaceName::Proc { .. } => "proc",
            PlaceName::Key { .. } => "key",
            PlaceName::SyncKey(_) => "synckey",
        }
    }

    pub fn decorate(&self, d: &Decoration) -> PlaceName {
        match self {
            PlaceName::Proc { path, residual } => {
                PlaceName::Proc { path: path.prepend(d.clone()), residual: residual.clone() }
            }
            PlaceName::Key { path, action } => PlaceName::Key { path: path.prepend(d.clone()), action: action.clone() },
            PlaceName::SyncKey(pair) => PlaceName::SyncKey(pair.decorate(d)),
        }
    }
}

impl fmt::Display for PlaceName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaceName::Proc { path, residual } => path.write_with(f, &|f| write!(f, "{residual}")),
            PlaceName::Key { path, action } => path.write_with(f, &|f| write!(f, "_{action}")),
            PlaceName::SyncKey(pair) => write!(f, "s{{{pair}}}"),
        }
    }
}

/// Render a list of names as `{n1, n2, ...}`.
pub fn render_set<'a, T: fmt::Display + 'a>(items: impl IntoIterator<Item = &'a T>) -> String {
    let parts: Vec<String> = items.into_iter().map(|x| x.to_string()).collect();
    alloc::format!("{{{}}}", parts.join(", "))
}
