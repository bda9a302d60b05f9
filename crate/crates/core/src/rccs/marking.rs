use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::{Choice, Memory, MemoryEvent, RProcess, RccsError};
use crate::ccs::{Channel, Process};
use crate::encoder::{initial_marking, CcsMarking};
use crate::names::{ActName, Decoration, Path, PlaceName, SyncPair};

/// The path of decorations a memory describes, without restrictions.
pub fn path(m: &Memory) -> Path {
    let mut out = Path::root();
    for e in m.oldest_first() {
        push_event(&mut out, e);
    }
    out
}

fn push_event(path: &mut Path, e: &MemoryEvent) {
    match e {
        MemoryEvent::Split(i) => path.0.push(Decoration::Par(*i)),
        MemoryEvent::Partial(c) | MemoryEvent::Full { choice: c, .. } => {
            if c.is_proper() {
                path.0.push(Decoration::Sum(c.taken));
            }
            path.0.push(Decoration::Past(c.action().clone()));
        }
    }
}

struct Pending {
    name: ActName,
    own: Memory,
    partner: Memory,
}

struct Thread<'a> {
    memory: &'a Memory,
    process: &'a Process,
    path: Path,
    keys: Vec<PlaceName>,
    pending: Vec<Pending>,
}

fn threads<'a>(r: &'a RProcess, anchors: &mut Vec<(usize, Channel)>, out: &mut Vec<Thread<'a>>) {
    match r {
        RProcess::Monitored(m, p) => out.push(walk(m, p, anchors)),
        RProcess::Par(l, rr) => {
            threads(l, anchors, out);
            threads(rr, anchors, out);
        }
        RProcess::Restrict { body, channel, anchor } => {
            anchors.push((anchor.len(), channel.clone()));
            threads(body, anchors, out);
            anchors.pop();
        }
    }
}

fn walk<'a>(m: &'a Memory, p: &'a Process, anchors: &[(usize, Channel)]) -> Thread<'a> {
    let mut path = Path::root();
    let mut keys = Vec::new();
    let mut pending = Vec::new();
    let restrictions_at = |path: &mut Path, i: usize| {
        for (_, c) in anchors.iter().filter(|(len, _)| *len == i) {
            path.0.push(Decoration::Restr(c.clone()));
        }
    };
    for (i, e) in m.oldest_first().iter().enumerate() {
        restrictions_at(&mut path, i);
        match e {
            MemoryEvent::Split(_) => {}
            MemoryEvent::Partial(c) => {
                let base = if c.is_proper() { path.child(Decoration::Sum(c.taken)) } else { path.clone() };
                keys.push(ActName::new(base, c.action().clone()).key_place());
            }
            MemoryEvent::Full { partner, choice: c } => {
                let base = if c.is_proper() { path.child(Decoration::Sum(c.taken)) } else { path.clone() };
                pending.push(Pending {
                    name: ActName::new(base, c.action().clone()),
                    own: m.prefix(i),
                    partner: partner.clone(),
                });
            }
        }
        push_event(&mut path, e);
    }
    restrictions_at(&mut path, m.len());
    Thread { memory: m, process: p, path, keys, pending }
}

/// The marking of the encoded net corresponding to `r`.
pub fn marking(r: &RProcess) -> Result<CcsMarking, RccsError> {
    let mut all = Vec::new();
    threads(r, &mut Vec::new(), &mut all);
    let mut out = BTreeSet::new();
    let pending: Vec<&Pending> = all.iter().flat_map(|t| t.pending.iter()).collect();
    for t in &all {
        out.extend(t.keys.iter().cloned());
        out.extend(initial_marking(&t.path, t.process));
    }
    for a in &pending {
        let b = pending
            .iter()
            .find(|b| b.own == a.partner && b.partner == a.own)
            .ok_or_else(|| RccsError::Incoherent(alloc::format!("synchronisation partner of {} is missing", a.own)))?;
        out.insert(PlaceName::SyncKey(SyncPair::new(a.name.clone(), b.name.clone())));
    }
    Ok(out)
}

/// The full path, restrictions included, of the thread whose memory is `m`.
pub fn located_path(r: &RProcess, m: &Memory) -> Option<Path> {
    let mut all = Vec::new();
    threads(r, &mut Vec::new(), &mut all);
    all.into_iter().find(|t| t.memory == m).map(|t| t.path)
}

/// The marking after the thread located at `base` executes `choice`
/// on its own, computed from the marking before.
pub fn act_marking_update(before: &CcsMarking, base: &Path, choice: &Choice) -> CcsMarking {
    let mut out = before.clone();
    if choice.is_proper() {
        for (i, branch) in choice.branches.iter().enumerate() {
            out.remove(&PlaceName::proc(base.child(Decoration::Sum(i)), Process::Sum(alloc::vec![branch.clone()])));
        }
    } else {
        out.remove(&PlaceName::proc(base.clone(), choice.source()));
    }
    let at = if choice.is_proper() { base.child(Decoration::Sum(choice.taken)) } else { base.clone() };
    let name = ActName::new(at, choice.action().clone());
    out.insert(name.key_place());
    out.extend(initial_marking(&name.path.child(Decoration::Past(choice.action().clone())), choice.continuation()));
    out
}
