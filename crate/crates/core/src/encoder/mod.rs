//! Encoding of CCS processes into unravel nets.
//!
//! [`encode`] builds the net lazily: the truncation at a marking is computed
//! by navigating the source term along the paths stored in place names, so
//! recursive processes yield infinite nets explored on demand.
//! [`compose`] builds the whole net of a recursion-free process bottom-up,
//! one operator at a time.

mod compose;

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

pub use compose::{compose, ComposeError};

use crate::ccs::{Process, ProcessError};
use crate::names::{ActName, Decoration, Path, PlaceName, SyncPair, TransitionName};
use crate::petri::{DirectedTransition, FiniteNet, LazyNet, Marking};
use crate::rccs::{marking as rccs_marking, RProcess, RccsError};

/// A net whose places and transitions carry encoding names.
pub type CcsNet = LazyNet<PlaceName, TransitionName>;
pub type CcsFiniteNet = FiniteNet<PlaceName, TransitionName>;
pub type CcsMarking = Marking<PlaceName>;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EncodeError {
    #[error(transparent)]
    Process(#[from] ProcessError),
    #[error(transparent)]
    Rccs(#[from] RccsError),
}

/// The places initially marked by the process located at `path`.
pub fn initial_marking(path: &Path, p: &Process) -> CcsMarking {
    let mut out = BTreeSet::new();
    collect_initial(path, p, &mut out);
    out
}

fn collect_initial(path: &Path, p: &Process, out: &mut CcsMarking) {
    match p {
        Process::Rec(..) => collect_initial(path, &p.unfold(), out),
        Process::Sum(branches) if branches.len() >= 2 => {
            for (i, branch) in branches.iter().enumerate() {
                out.insert(PlaceName::proc(path.child(Decoration::Sum(i)), Process::Sum(alloc::vec![branch.clone()])));
            }
        }
        Process::Sum(_) => {
            out.insert(PlaceName::proc(path.clone(), p.clone()));
        }
        Process::Par(l, r) => {
            collect_initial(&path.child(Decoration::Par(0)), l, out);
            collect_initial(&path.child(Decoration::Par(1)), r, out);
        }
        Process::Restrict(body, c) => collect_initial(&path.child(Decoration::Restr(c.clone())), body, out),
        Process::Var(x) => panic!("free process variable `{x}` in an encoded term"),
    }
}

/// The subterm of `root` reached along `path`, with recursion heads unfolded.
/// A `Sum(i)` step yields the i-th branch as a single-branch sum.
pub fn locate(root: &Process, path: &[Decoration]) -> Option<Process> {
    let mut current = root.unfold();
    for d in path {
        current = match (d, current) {
            (Decoration::Par(0), Process::Par(l, _)) => l.unfold(),
            (Decoration::Par(1), Process::Par(_, r)) => r.unfold(),
            (Decoration::Sum(i), Process::Sum(branches)) if branches.len() >= 2 => {
                Process::Sum(alloc::vec![branches.get(*i)?.clone()])
            }
            (Decoration::Past(a), Process::Sum(branches)) if branches.len() == 1 && branches[0].0 == *a => {
                branches[0].1.unfold()
            }
            (Decoration::Restr(c), Process::Restrict(body, c2)) if *c == c2 => body.unfold(),
            _ => return None,
        };
    }
    Some(current)
}

type Arcs = (CcsMarking, CcsMarking);

/// Preset and postset of the transition executing the prefix at `t.path`,
/// regardless of restrictions.
fn act_arcs(root: &Process, t: &ActName) -> Option<Arcs> {
    let here = locate(root, t.path.decorations())?;
    let continuation = match &here {
        Process::Sum(branches) if branches.len() == 1 && branches[0].0 == t.action => &branches[0].1,
        _ => return None,
    };
    let mut preset = BTreeSet::new();
    preset.insert(PlaceName::proc(t.path.clone(), here.clone()));
    if let Some(Decoration::Sum(z)) = t.path.last() {
        let parent = t.path.parent();
        let Some(Process::Sum(branches)) = locate(root, parent.decorations()) else {
            return None;
        };
        for (j, branch) in branches.iter().enumerate().filter(|(j, _)| j != z) {
            preset.insert(PlaceName::proc(parent.child(Decoration::Sum(j)), Process::Sum(alloc::vec![branch.clone()])));
        }
    }
    let mut postset = initial_marking(&t.path.child(Decoration::Past(t.action.clone())), continuation);
    postset.insert(t.key_place());
    Some((preset, postset))
}

fn act_allowed(t: &ActName) -> bool {
    t.action.channel().is_none_or(|c| !t.path.restricts(c))
}

/// Whether two prefixes sit on opposite sides of a parallel composition,
/// carry dual actions, and no restriction below the fork hides the channel.
fn can_sync(t1: &ActName, t2: &ActName) -> bool {
    if !t1.action.is_dual_of(&t2.action) {
        return false;
    }
    let (p1, p2) = (t1.path.decorations(), t2.path.decorations());
    let k = p1.iter().zip(p2).take_while(|(a, b)| a == b).count();
    let forks = matches!(
        (p1.get(k), p2.get(k)),
        (Some(Decoration::Par(0)), Some(Decoration::Par(1))) | (Some(Decoration::Par(1)), Some(Decoration::Par(0)))
    );
    let channel = t1.action.channel().expect("dual actions are visible");
    forks && !Path(p1[k..].to_vec()).restricts(channel) && !Path(p2[k..].to_vec()).restricts(channel)
}

fn sync_arcs(root: &Process, pair: &SyncPair) -> Option<Arcs> {
    let (t1, t2) = pair.components();
    if !can_sync(t1, t2) {
        return None;
    }
    let (pre1, mut post1) = act_arcs(root, t1)?;
    let (pre2, mut post2) = act_arcs(root, t2)?;
    post1.remove(&t1.key_place());
    post2.remove(&t2.key_place());
    let preset = pre1.union(&pre2).cloned().collect();
    let mut postset: CcsMarking = post1.union(&post2).cloned().collect();
    postset.insert(PlaceName::SyncKey(pair.clone()));
    Some((preset, postset))
}

/// Preset and postset of a forward transition of the encoding of `root`, or
/// `None` if the net has no such transition.
pub fn transition_arcs(root: &Process, t: &TransitionName) -> Option<Arcs> {
    match t {
        TransitionName::Act(a) if act_allowed(a) => act_arcs(root, a),
        TransitionName::Act(_) => None,
        TransitionName::Sync(pair) => sync_arcs(root, pair),
    }
}

/// The forward truncation of the encoding of `root` at marking `m`: every
/// transition whose prefix place is marked, and the producers of marked key
/// places.
pub fn truncation(root: &Process, m: &CcsMarking) -> CcsFiniteNet {
    let mut net = FiniteNet::new(m.clone());
    let mut wanted: BTreeSet<TransitionName> = BTreeSet::new();
    let mut prefixes: Vec<ActName> = Vec::new();
    for place in m {
        match place {
            PlaceName::Proc { path, residual: Process::Sum(branches) } if branches.len() == 1 => {
                prefixes.push(ActName::new(path.clone(), branches[0].0.clone()));
            }
            PlaceName::Proc { .. } => {}
            PlaceName::Key { path, action } => {
                wanted.insert(TransitionName::act(path.parent(), action.clone()));
            }
            PlaceName::SyncKey(pair) => {
                wanted.insert(TransitionName::Sync(pair.clone()));
            }
        }
    }
    for (i, t1) in prefixes.iter().enumerate() {
        wanted.insert(TransitionName::Act(t1.clone()));
        for t2 in &prefixes[i + 1..] {
            if can_sync(t1, t2) {
                wanted.insert(TransitionName::sync(t1.clone(), t2.clone()));
            }
        }
    }
    for t in wanted {
        if let Some((preset, postset)) = transition_arcs(root, &t) {
            net.add_transition(DirectedTransition::fwd(t), preset, postset)
                .expect("encoded transitions have non-empty presets");
        }
    }
    net
}

/// The (possibly infinite) unravel net of a closed, guarded process.
pub fn encode(p: &Process) -> Result<CcsNet, EncodeError> {
    p.validate()?;
    let root = p.clone();
    Ok(LazyNet::new(initial_marking(&Path::root(), p), move |m| truncation(&root, m)))
}

/// The reversible net of an RCCS process: the encoding of its ancestor with
/// every transition reversible, started at the marking of `r`.
pub fn encode_reversible(r: &RProcess) -> Result<CcsNet, EncodeError> {
    let origin = r.ancestor()?;
    let marking = rccs_marking(r)?;
    Ok(encode(&origin)?.reversed(|_| true).with_initial(marking))
}
