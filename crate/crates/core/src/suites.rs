//! Bounded property suites over the encoding of a process.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::bisim::{check_frbisim, names_agree};
use crate::ccs::Process;
use crate::encoder::{encode, encode_reversible, CcsNet, EncodeError};
use crate::names::render_set;
use crate::petri::{enabled, explore, fire, is_safe, reachable_markings, Direction};
use crate::rccs::{
    act_marking_update, backward_steps, forward_steps, located_path, marking, MemoryEvent, RLabel, RProcess, RccsError,
};
use crate::unravel::{is_reversible_unravel, is_unravel_net, key_places, Violation};

/// Outcome of one property.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyReport {
    pub name: &'static str,
    pub ok: bool,
    /// What was checked when ok; the violated condition otherwise.
    pub condition: String,
    /// Sizes when ok; a witness otherwise.
    pub detail: String,
}

impl PropertyReport {
    fn pass(name: &'static str, condition: &str, detail: String) -> PropertyReport {
        PropertyReport { name, ok: true, condition: condition.to_string(), detail }
    }

    fn fail(name: &'static str, condition: &str, witness: String) -> PropertyReport {
        PropertyReport { name, ok: false, condition: condition.to_string(), detail: witness }
    }

    fn from_violation<P, T>(name: &'static str, ok_detail: String, r: Result<(), Violation<P, T>>) -> PropertyReport
    where
        P: Ord + core::fmt::Debug + core::fmt::Display,
        T: Ord + core::fmt::Debug + core::fmt::Display,
    {
        match r {
            Ok(()) => PropertyReport::pass(name, name, ok_detail),
            Err(v) => PropertyReport::fail(name, v.condition(), v.witness()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub term: String,
    pub depth: usize,
    /// Places and transitions of the reversible net explored to `depth`.
    pub explored_places: usize,
    pub explored_transitions: usize,
    pub properties: Vec<PropertyReport>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.properties.iter().all(|p| p.ok)
    }

    pub fn first_failure(&self) -> Option<&PropertyReport> {
        self.properties.iter().find(|p| !p.ok)
    }
}

/// RCCS states reachable from `r` in at most `depth` forward or backward
/// steps, in split-normal form.
pub fn rccs_reachable(r: &RProcess, depth: usize) -> BTreeSet<RProcess> {
    let start = r.split_normalize();
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([(start, 0)]);
    while let Some((s, d)) = queue.pop_front() {
        if d == depth {
            continue;
        }
        for (_, next) in forward_steps(&s).into_iter().chain(backward_steps(&s)) {
            if seen.insert(next.clone()) {
                queue.push_back((next, d + 1));
            }
        }
    }
    seen
}

/// Firing a transition and then its reverse gives back the marking, for
/// every transition enabled at a marking reachable within `depth`.
pub fn net_loop(n: &CcsNet, depth: usize) -> Result<usize, String> {
    let mut checked = 0;
    for m in reachable_markings(n, depth).map_err(|e| format!("{e:?}"))? {
        for t in enabled(n, &m) {
            let after = fire(n, &m, &t).map_err(|e| format!("{e:?}"))?;
            match fire(n, &after, &t.reversed()) {
                Ok(back) if back == m => checked += 1,
                _ => return Err(format!("{t} at {} is not undone by {}", render_set(&m), t.reversed())),
            }
        }
    }
    Ok(checked)
}

/// Every step from every state reachable within `depth` can be undone by a
/// step with the same label in the other direction.
pub fn rccs_loop(r: &RProcess, depth: usize) -> Result<usize, String> {
    let mut checked = 0;
    for s in rccs_reachable(r, depth) {
        for (label, target) in forward_steps(&s) {
            if !backward_steps(&target).contains(&(label.clone(), s.clone())) {
                return Err(format!("forward {label} from {s} cannot be undone"));
            }
            checked += 1;
        }
        for (label, target) in backward_steps(&s) {
            if !forward_steps(&target).contains(&(label.clone(), s.clone())) {
                return Err(format!("backward {label} from {s} cannot be redone"));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

fn steps_in(direction: Direction, r: &RProcess) -> BTreeSet<(RLabel, RProcess)> {
    match direction {
        Direction::Fwd => forward_steps(r),
        Direction::Bwd => backward_steps(r),
    }
}

/// At every RCCS state reachable within `depth`, the steps of the state and
/// the transitions enabled at its marking in its reversible net correspond
/// one to one: same direction, agreeing names, and the target's marking is
/// the result of the firing.
pub fn step_correspondence(r: &RProcess, depth: usize) -> Result<usize, String> {
    let mut checked = 0;
    for s in rccs_reachable(r, depth) {
        let n = encode_reversible(&s).map_err(|e| format!("{e}"))?;
        let m = n.initial().clone();
        let ts = enabled(&n, &m);
        let mut firings = Vec::new();
        for t in &ts {
            firings.push((t, fire(&n, &m, t).map_err(|e| format!("{e:?}"))?));
        }
        let mut steps = Vec::new();
        for direction in [Direction::Fwd, Direction::Bwd] {
            for (label, target) in steps_in(direction, &s) {
                let image = marking(&target).map_err(|e| format!("{e}"))?;
                steps.push((direction, label, image));
            }
        }
        let agrees = |(d, label, image): &(Direction, RLabel, _), (t, next): &(&crate::bisim::CcsTransition, _)| {
            t.direction == *d && names_agree(label, &t.name) && next == image
        };
        for step in &steps {
            let count = firings.iter().filter(|f| agrees(step, f)).count();
            if count != 1 {
                return Err(format!("{}{} at {s} matches {count} transitions", step.0.arrow(), step.1));
            }
        }
        for f in &firings {
            let count = steps.iter().filter(|step| agrees(step, f)).count();
            if count != 1 {
                return Err(format!("{} at {s} matches {count} steps", f.0));
            }
        }
        checked += steps.len();
    }
    Ok(checked)
}

/// The marking after a single-thread forward step is obtained from the
/// marking before by the local update of that thread.
pub fn incremental_marking(r: &RProcess, label: &RLabel, target: &RProcess) -> Result<bool, RccsError> {
    let [m] = label.memories.as_slice() else {
        return Ok(true);
    };
    let source = r.split_normalize();
    let base = located_path(&source, m).ok_or_else(|| RccsError::Incoherent(format!("no thread with memory {m}")))?;
    let choice = target
        .threads()
        .into_iter()
        .find_map(|(mem, _)| match mem.oldest_first().get(m.len()) {
            Some(MemoryEvent::Partial(c)) if mem.len() > m.len() && mem.starts_with(m) => Some(c.clone()),
            _ => None,
        })
        .ok_or_else(|| RccsError::Incoherent(format!("no new event above {m}")))?;
    Ok(act_marking_update(&marking(&source)?, &base, &choice) == marking(target)?)
}

fn mu_incremental(r: &RProcess, depth: usize) -> Result<usize, String> {
    let mut checked = 0;
    for s in rccs_reachable(r, depth) {
        for (label, target) in forward_steps(&s).into_iter().filter(|(l, _)| !l.is_sync()) {
            if !incremental_marking(&s, &label, &target).map_err(|e| format!("{e}"))? {
                return Err(format!("{label} from {s}"));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

fn counted(name: &'static str, what: &str, r: Result<usize, String>) -> PropertyReport {
    match r {
        Ok(k) => PropertyReport::pass(name, name, format!("{k} {what}")),
        Err(w) => PropertyReport::fail(name, name, w),
    }
}

/// Runs every property suite on `p` to `depth`.
pub fn run_suites(p: &Process, depth: usize) -> Result<SuiteReport, EncodeError> {
    let net = encode(p)?;
    let r = RProcess::initial(p.clone());
    let rev = encode_reversible(&r)?;
    let mut properties = Vec::new();
    let (explored_places, explored_transitions) = match explore(&rev, depth) {
        Ok(x) => (x.places().len(), x.transition_count()),
        Err(e) => {
            properties.push(PropertyReport::fail("safe", "safety", format!("{e:?}")));
            (0, 0)
        }
    };
    let forward = explore(&net, depth);
    let sizes = forward.as_ref().map(|x| format!("{} places, {} transitions", x.places().len(), x.transition_count()));
    properties.push(PropertyReport::from_violation(
        "unravel",
        sizes.clone().unwrap_or_default(),
        is_unravel_net(&net, depth),
    ));
    properties.push(match &forward {
        Ok(x) => PropertyReport::from_violation(
            "complete",
            format!("{} key places", x.transition_count()),
            key_places(x).map(|_| ()),
        ),
        Err(e) => PropertyReport::fail("complete", "safety", format!("{e:?}")),
    });
    properties.push(PropertyReport::from_violation(
        "safe",
        sizes.unwrap_or_default(),
        is_safe(&rev, depth).map_err(Violation::Unsafe),
    ));
    properties.push(PropertyReport::from_violation(
        "reversible-unravel",
        format!("{explored_transitions} transitions"),
        is_reversible_unravel(&rev, depth),
    ));
    properties.push(counted("net-loop", "firings undone", net_loop(&rev, depth)));
    properties.push(counted("rccs-loop", "steps undone", rccs_loop(&r, depth)));
    properties.push(match (reachable_markings(&rev, depth), reachable_markings(&net, depth)) {
        (Ok(a), Ok(b)) if a == b => {
            PropertyReport::pass("reachability", "reachability", format!("{} markings", a.len()))
        }
        (Ok(a), Ok(b)) => PropertyReport::fail(
            "reachability",
            "reachability",
            format!("{} markings with reversing, {} forward only", a.len(), b.len()),
        ),
        (Err(e), _) | (_, Err(e)) => PropertyReport::fail("reachability", "safety", format!("{e:?}")),
    });
    properties.push(counted("correspondence", "steps matched", step_correspondence(&r, depth)));
    properties.push(counted("marking-update", "steps checked", mu_incremental(&r, depth)));
    properties.push(match check_frbisim(&r, &rev, depth) {
        Ok(v) if v.ok => PropertyReport::pass("bisimulation", "bisimulation", format!("{} pairs", v.pairs)),
        Ok(v) => {
            let cx = v.counterexample.expect("failed verdicts carry a counterexample");
            PropertyReport::fail("bisimulation", &format!("bisimulation clause {}", cx.clause), cx.to_string())
        }
        Err(e) => PropertyReport::fail("bisimulation", "coherence", e.to_string()),
    });
    Ok(SuiteReport { term: p.to_string(), depth, explored_places, explored_transitions, properties })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ccs::parse_process;

    #[test]
    fn all_suites_pass_on_small_terms() {
        for term in ["0", "a.b | ~a.c", "a.a | (~a + b)", "(a.b | ~a.c)\\a", "rec X. a.X"] {
            let report = run_suites(&parse_process(term).unwrap(), 4).unwrap();
            assert!(report.ok(), "{term}: {:?}", report.first_failure());
        }
    }

    #[test]
    fn reachable_states_of_choice() {
        let r = RProcess::initial(parse_process("a.b + c").unwrap());
        assert_eq!(rccs_reachable(&r, 3).len(), 4);
    }
}
