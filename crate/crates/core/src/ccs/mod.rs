//! CCS processes: syntax, parsing, rendering and the forward LTS.

mod parse;
mod render;

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

pub use parse::{parse_process, ParseError, ParseErrorKind};

/// A channel name, matching `[a-zA-Z][a-zA-Z0-9_]*` and not a reserved word.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Channel(String);

impl Channel {
    pub fn new(name: &str) -> Result<Channel, InvalidChannel> {
        if is_identifier(name) && !is_reserved(name) {
            Ok(Channel(name.to_string()))
        } else {
            Err(InvalidChannel(name.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl FromStr for Channel {
    type Err = InvalidChannel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Channel::new(s)
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("invalid channel name `{0}`")]
pub struct InvalidChannel(pub String);

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn is_reserved(s: &str) -> bool {
    s == "rec" || s == "tau"
}

/// An input `a`, an output `~a` or the silent action.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    Input(Channel),
    Output(Channel),
    Tau,
}

impl Action {
    /// The complementary action. `Tau` has none.
    pub fn dual(&self) -> Option<Action> {
        match self {
            Action::Input(a) => Some(Action::Output(a.clone())),
            Action::Output(a) => Some(Action::Input(a.clone())),
            Action::Tau => None,
        }
    }

    pub fn channel(&self) -> Option<&Channel> {
        match self {
            Action::Input(a) | Action::Output(a) => Some(a),
            Action::Tau => None,
        }
    }

    pub fn is_dual_of(&self, other: &Action) -> bool {
        self.dual().as_ref() == Some(other)
    }

    /// Whether a restriction on `channel` blocks this action.
    pub fn blocked_by(&self, channel: &Channel) -> bool {
        self.channel() == Some(channel)
    }

    /// Process-syntax rendering: `a`, `~a` or `tau`.
    pub fn ccs_text(&self) -> String {
        match self {
            Action::Input(a) => a.0.clone(),
            Action::Output(a) => alloc::format!("~{a}"),
            Action::Tau => "tau".to_string(),
        }
    }
}

/// Name rendering: `a?`, `a!` or `tau`.
impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Input(a) => write!(f, "{a}?"),
            Action::Output(a) => write!(f, "{a}!"),
            Action::Tau => f.write_str("tau"),
        }
    }
}

/// A CCS process. `Sum(vec![])` is the inert process `0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Process {
    Sum(Vec<(Action, Process)>),
    Par(Box<Process>, Box<Process>),
    Restrict(Box<Process>, Channel),
    Var(String),
    Rec(String, Box<Process>),
}

impl Process {
    pub fn nil() -> Process {
        Process::Sum(Vec::new())
    }

    pub fn prefix(action: Action, continuation: Process) -> Process {
        Process::Sum(alloc::vec![(action, continuation)])
    }

    pub fn par(left: Process, right: Process) -> Process {
        Process::Par(Box::new(left), Box::new(right))
    }

    pub fn restrict(body: Process, channel: Channel) -> Process {
        Process::Restrict(Box::new(body), channel)
    }

    pub fn rec(var: &str, body: Process) -> Process {
        Process::Rec(var.to_string(), Box::new(body))
    }

    pub fn is_nil(&self) -> bool {
        matches!(self, Process::Sum(branches) if branches.is_empty())
    }

    /// Unfold `rec` heads until the process is no longer a recursion.
    pub fn unfold(&self) -> Process {
        let mut current = self.clone();
        while let Process::Rec(var, body) = &current {
            current = body.substitute(var, &current);
        }
        current
    }

    /// Capture-avoiding substitution of the process variable `var`.
    ///
    /// `replacement` is expected to be closed, which makes capture impossible.
    pub fn substitute(&self, var: &str, replacement: &Process) -> Process {
        match self {
            Process::Sum(branches) => {
                Process::Sum(branches.iter().map(|(a, p)| (a.clone(), p.substitute(var, replacement))).collect())
            }
            Process::Par(l, r) => Process::par(l.substitute(var, replacement), r.substitute(var, replacement)),
            Process::Restrict(p, a) => Process::restrict(p.substitute(var, replacement), a.clone()),
            Process::Var(x) if x == var => replacement.clone(),
            Process::Var(_) => self.clone(),
            Process::Rec(x, _) if x == var => self.clone(),
            Process::Rec(x, body) => Process::rec(x, body.substitute(var, replacement)),
        }
    }

    /// Rename free occurrences of channel `from` to `to`.
    pub fn rename_channel(&self, from: &Channel, to: &Channel) -> Process {
        let rename_action = |a: &Action| match a {
            Action::Input(c) if c == from => Action::Input(to.clone()),
            Action::Output(c) if c == from => Action::Output(to.clone()),
            other => other.clone(),
        };
        match self {
            Process::Sum(branches) => {
                Process::Sum(branches.iter().map(|(a, p)| (rename_action(a), p.rename_channel(from, to))).collect())
            }
            Process::Par(l, r) => Process::par(l.rename_channel(from, to), r.rename_channel(from, to)),
            Process::Restrict(_, a) if a == from => self.clone(),
            Process::Restrict(p, a) => Process::restrict(p.rename_channel(from, to), a.clone()),
            Process::Var(_) => self.clone(),
            Process::Rec(x, body) => Process::rec(x, body.rename_channel(from, to)),
        }
    }

    /// Free channel names.
    pub fn free_names(&self) -> BTreeSet<Channel> {
        let mut out = BTreeSet::new();
        self.collect_free_names(&mut out);
        out
    }

    fn collect_free_names(&self, out: &mut BTreeSet<Channel>) {
        match self {
            Process::Sum(branches) => {
                for (a, p) in branches {
                    if let Some(c) = a.channel() {
                        out.insert(c.clone());
                    }
                    p.collect_free_names(out);
                }
            }
            Process::Par(l, r) => {
                l.collect_free_names(out);
                r.collect_free_names(out);
            }
            Process::Restrict(p, a) => {
                let mut inner = BTreeSet::new();
                p.collect_free_names(&mut inner);
                inner.remove(a);
                out.extend(inner);
            }
            Process::Var(_) => {}
            Process::Rec(_, body) => body.collect_free_names(out),
        }
    }

    /// Channels bound by a restriction somewhere in the term.
    pub fn bound_names(&self) -> BTreeSet<Channel> {
        let mut out = BTreeSet::new();
        self.collect_bound_names(&mut out);
        out
    }

    fn collect_bound_names(&self, out: &mut BTreeSet<Channel>) {
        match self {
            Process::Sum(branches) => branches.iter().for_each(|(_, p)| p.collect_bound_names(out)),
            Process::Par(l, r) => {
                l.collect_bound_names(out);
                r.collect_bound_names(out);
            }
            Process::Restrict(p, a) => {
                out.insert(a.clone());
                p.collect_bound_names(out);
            }
            Process::Var(_) => {}
            Process::Rec(_, body) => body.collect_bound_names(out),
        }
    }

    fn all_channels(&self, out: &mut BTreeSet<Channel>) {
        self.collect_free_names(out);
        self.collect_bound_names(out);
    }

    /// Free process variables.
    pub fn free_vars(&self) -> BTreeSet<String> {
        match self {
            Process::Sum(branches) => branches.iter().flat_map(|(_, p)| p.free_vars()).collect(),
            Process::Par(l, r) => l.free_vars().union(&r.free_vars()).cloned().collect(),
            Process::Restrict(p, _) => p.free_vars(),
            Process::Var(x) => [x.clone()].into_iter().collect(),
            Process::Rec(x, body) => {
                let mut vars = body.free_vars();
                vars.remove(x);
                vars
            }
        }
    }

    /// Checks that the term has no free variables and every recursion
    /// variable occurs under a prefix.
    pub fn validate(&self) -> Result<(), ProcessError> {
        if let Some(x) = self.free_vars().into_iter().next() {
            return Err(ProcessError::FreeVariable(x));
        }
        self.check_guarded(&BTreeSet::new())
    }

    fn check_guarded(&self, unguarded: &BTreeSet<String>) -> Result<(), ProcessError> {
        match self {
            Process::Sum(branches) => {
                for (_, p) in branches {
                    p.check_guarded(&BTreeSet::new())?;
                }
                Ok(())
            }
            Process::Par(l, r) => {
                l.check_guarded(unguarded)?;
                r.check_guarded(unguarded)
            }
            Process::Restrict(p, _) => p.check_guarded(unguarded),
            Process::Var(x) if unguarded.contains(x) => Err(ProcessError::UnguardedRecursion(x.clone())),
            Process::Var(_) => Ok(()),
            Process::Rec(x, body) => {
                let mut inner = unguarded.clone();
                inner.insert(x.clone());
                body.check_guarded(&inner)
            }
        }
    }

    /// Rename restriction binders so that no binder shadows another bound
    /// or free channel of the whole term. Fresh names use the scheme `name_N`.
    pub fn freshen_binders(&self) -> Process {
        let mut taken = BTreeSet::new();
        self.all_channels(&mut taken);
        let mut seen = BTreeSet::new();
        let free = self.free_names();
        self.freshen(&mut taken, &mut seen, &free)
    }

    fn freshen(
        &self,
        taken: &mut BTreeSet<Channel>,
        seen: &mut BTreeSet<Channel>,
        free: &BTreeSet<Channel>,
    ) -> Process {
        match self {
            Process::Sum(branches) => {
                Process::Sum(branches.iter().map(|(a, p)| (a.clone(), p.freshen(taken, seen, free))).collect())
            }
            Process::Par(l, r) => {
                let l = l.freshen(taken, seen, free);
                Process::par(l, r.freshen(taken, seen, free))
            }
            Process::Restrict(p, a) => {
                if seen.contains(a) || free.contains(a) {
                    let fresh = fresh_channel(a, taken);
                    taken.insert(fresh.clone());
                    seen.insert(fresh.clone());
                    let renamed = p.rename_channel(a, &fresh);
                    Process::restrict(renamed.freshen(taken, seen, free), fresh)
                } else {
                    seen.insert(a.clone());
                    Process::restrict(p.freshen(taken, seen, free), a.clone())
                }
            }
            Process::Var(_) => self.clone(),
            Process::Rec(x, body) => Process::rec(x, body.freshen(taken, seen, free)),
        }
    }
}

fn fresh_channel(base: &Channel, taken: &BTreeSet<Channel>) -> Channel {
    (1..)
        .map(|i| Channel(alloc::format!("{}_{}", base.0, i)))
        .find(|c| !taken.contains(c))
        .expect("unbounded supply of names")
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ProcessError {
    #[error("free process variable `{0}`")]
    FreeVariable(String),
    #[error("recursion variable `{0}` is not guarded by a prefix")]
    UnguardedRecursion(String),
}

/// The forward labelled transitions of a closed process.
pub fn ccs_steps(p: &Process) -> BTreeSet<(Action, Process)> {
    match p {
        Process::Sum(branches) => branches.iter().cloned().collect(),
        Process::Par(l, r) => {
            let left = ccs_steps(l);
            let right = ccs_steps(r);
            let mut out = BTreeSet::new();
            for (a, l2) in &left {
                out.insert((a.clone(), Process::par(l2.clone(), (**r).clone())));
            }
            for (a, r2) in &right {
                out.insert((a.clone(), Process::par((**l).clone(), r2.clone())));
            }
            for (a, l2) in &left {
                for (b, r2) in &right {
                    if a.is_dual_of(b) {
                        out.insert((Action::Tau, Process::par(l2.clone(), r2.clone())));
                    }
                }
            }
            out
        }
        Process::Restrict(body, c) => ccs_steps(body)
            .into_iter()
            .filter(|(a, _)| !a.blocked_by(c))
            .map(|(a, q)| (a, Process::restrict(q, c.clone())))
            .collect(),
        Process::Var(_) => BTreeSet::new(),
        Process::Rec(..) => ccs_steps(&p.unfold()),
    }
}

/// Count of the operator nodes of a term, used to bound random generation.
pub fn operator_count(p: &Process) -> usize {
    match p {
        Process::Sum(branches) => {
            branches.len().saturating_sub(1) + branches.iter().map(|(_, q)| 1 + operator_count(q)).sum::<usize>()
        }
        Process::Par(l, r) => 1 + operator_count(l) + operator_count(r),
        Process::Restrict(q, _) => 1 + operator_count(q),
        Process::Var(_) => 0,
        Process::Rec(_, body) => 1 + operator_count(body),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ch(s: &str) -> Channel {
        Channel::new(s).unwrap()
    }

    #[test]
    fn dual_swaps_polarity() {
        assert_eq!(Action::Input(ch("a")).dual(), Some(Action::Output(ch("a"))));
        assert_eq!(Action::Output(ch("a")).dual(), Some(Action::Input(ch("a"))));
        assert_eq!(Action::Tau.dual(), None);
    }

    #[test]
    fn channel_validation() {
        assert!(Channel::new("a_1").is_ok());
        assert!(Channel::new("1a").is_err());
        assert!(Channel::new("tau").is_err());
        assert!(Channel::new("").is_err());
    }

    #[test]
    fn unfold_rec() {
        let p = parse_process("rec X. a.X").unwrap();
        let u = p.unfold();
        assert_eq!(u, Process::prefix(Action::Input(ch("a")), p.clone()));
        assert_eq!(ccs_steps(&p), ccs_steps(&u));
    }

    #[test]
    fn steps_of_par_include_sync() {
        let p = parse_process("a.b | ~a.c").unwrap();
        let steps = ccs_steps(&p);
        assert_eq!(steps.len(), 3);
        assert!(steps.iter().any(|(a, _)| *a == Action::Tau));
    }

    #[test]
    fn restriction_blocks_channel() {
        let p = parse_process("(a.b | ~a.c)\\a").unwrap();
        let labels: Vec<_> = ccs_steps(&p).into_iter().map(|(a, _)| a).collect();
        assert_eq!(labels, alloc::vec![Action::Tau]);
    }

    #[test]
    fn free_and_bound_names() {
        let p = parse_process("(a.b | ~a.c)\\a").unwrap();
        let free: Vec<_> = p.free_names().into_iter().map(|c| c.0).collect();
        assert_eq!(free, ["b", "c"]);
        assert_eq!(p.bound_names().len(), 1);
    }

    #[test]
    fn freshening_renames_clashing_binders() {
        let p = parse_process("(a.0)\\a | a.0").unwrap();
        assert_eq!(p.to_string(), "(a_1.0)\\a_1 | a.0");
        let q = parse_process("(a.0)\\a | (a.0)\\a").unwrap();
        assert_eq!(q.to_string(), "(a.0)\\a | (a_1.0)\\a_1");
        let plain = parse_process("(a.0)\\a | b.0").unwrap();
        assert_eq!(plain.to_string(), "(a.0)\\a | b.0");
    }

    #[test]
    fn guardedness() {
        assert_eq!(
            Process::rec("X", Process::Var("X".into())).validate(),
            Err(ProcessError::UnguardedRecursion("X".into()))
        );
        assert_eq!(Process::Var("Y".into()).validate(), Err(ProcessError::FreeVariable("Y".into())));
    }
}
