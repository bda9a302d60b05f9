mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use revccs_core::ccs::{ccs_steps, parse_process, Action, Channel, Process};
use revccs_core::encoder::{compose, encode, encode_reversible};
use revccs_core::petri::{executions, explore, is_safe, reachable_markings};
use revccs_core::rccs::{apply_sync_update, backward_steps, forward_steps, marking, RProcess};
use revccs_core::suites::{incremental_marking, rccs_reachable};
use revccs_core::unravel::is_reversible_unravel;

fn term(seed: u64) -> Process {
    common::random_terms(seed, 1, common::MAX_OPERATORS).pop().unwrap()
}

/// A state reached from the term by a random forward run of `len` steps.
fn walk(p: &Process, seed: u64, len: usize) -> Vec<RProcess> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut states = vec![RProcess::initial(p.clone()).split_normalize()];
    for _ in 0..len {
        let steps: Vec<_> = forward_steps(states.last().unwrap()).into_iter().collect();
        if steps.is_empty() {
            break;
        }
        let (_, next) = steps[rng.gen_range(0..steps.len())].clone();
        states.push(next);
    }
    states
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn render_then_parse_is_identity(seed in any::<u64>()) {
        let p = term(seed);
        prop_assert_eq!(parse_process(&p.to_string()).unwrap(), p.clone());
        prop_assert_eq!(parse_process(&p.to_string()).unwrap().to_string(), p.to_string());
    }

    #[test]
    fn unfolding_preserves_steps(seed in any::<u64>()) {
        let p = term(seed);
        prop_assert_eq!(ccs_steps(&p), ccs_steps(&p.unfold()));
    }

    #[test]
    fn dual_is_an_involution(name in "[a-z][a-z0-9_]{0,4}") {
        prop_assume!(name != "rec" && name != "tau");
        let c = Channel::new(&name).unwrap();
        for a in [Action::Input(c.clone()), Action::Output(c)] {
            prop_assert_eq!(a.dual().unwrap().dual().unwrap(), a);
        }
    }

    #[test]
    fn normalising_preserves_the_marking(seed in any::<u64>(), len in 0usize..6) {
        for r in walk(&term(seed), seed, len) {
            prop_assert_eq!(marking(&r).unwrap(), marking(&r.split_normalize()).unwrap());
            prop_assert_eq!(r.split_normalize(), r.split_normalize().split_normalize());
        }
    }

    #[test]
    fn loop_lemma_on_runs(seed in any::<u64>(), len in 1usize..8) {
        let states = walk(&term(seed), seed, len);
        for pair in states.windows(2) {
            let back = backward_steps(&pair[1]);
            prop_assert!(back.iter().any(|(_, s)| *s == pair[0]));
            for (label, prev) in back {
                prop_assert!(forward_steps(&prev).contains(&(label, pair[1].clone())));
            }
        }
    }

    #[test]
    fn ancestor_is_stable_along_runs(seed in any::<u64>(), len in 1usize..8) {
        let p = term(seed);
        let states = walk(&p, seed, len);
        let origin = states[0].ancestor().unwrap();
        for s in &states {
            prop_assert_eq!(s.ancestor().unwrap().unfold(), origin.unfold());
            for (_, prev) in backward_steps(s) {
                prop_assert_eq!(prev.ancestor().unwrap().unfold(), origin.unfold());
            }
        }
    }

    #[test]
    fn marking_update_is_local(seed in any::<u64>(), len in 0usize..6) {
        for r in walk(&term(seed), seed, len) {
            for (label, target) in forward_steps(&r) {
                prop_assert!(incremental_marking(&r, &label, &target).unwrap(), "{} {}", r, label);
            }
        }
    }

    #[test]
    fn static_and_lazy_nets_agree_where_reachable(seed in any::<u64>()) {
        let p = term(seed);
        if let Ok(n) = compose(&p) {
            let lazy = explore(&encode(&p).unwrap(), 16).unwrap();
            prop_assert_eq!(lazy.initial(), n.initial());
            for (t, arcs) in lazy.transitions() {
                prop_assert_eq!(Some(arcs), n.arcs(t));
            }
            for x in executions(&n, 16).unwrap() {
                prop_assert!(x.keys().all(|t| lazy.arcs(t).is_some()));
            }
        }
    }

    #[test]
    fn reversible_nets_are_safe_reversible_unravel_nets(seed in any::<u64>()) {
        let r = RProcess::initial(term(seed));
        let n = encode_reversible(&r).unwrap();
        prop_assert!(is_safe(&n, 6).is_ok());
        prop_assert!(is_reversible_unravel(&n, 4).is_ok());
    }

    #[test]
    fn reversing_reaches_nothing_new(seed in any::<u64>()) {
        let p = term(seed);
        let n = encode(&p).unwrap();
        prop_assert_eq!(reachable_markings(&n, 6).unwrap(), reachable_markings(&n.reversed(|_| true), 6).unwrap());
    }

    #[test]
    fn mixed_runs_reach_forward_states(seed in any::<u64>()) {
        let r = RProcess::initial(term(seed));
        let mixed = rccs_reachable(&r, 4);
        let mut forward = BTreeSet::from([r.split_normalize()]);
        let mut frontier = forward.clone();
        for _ in 0..4 {
            frontier = frontier.iter().flat_map(forward_steps).map(|(_, s)| s).filter(|s| !forward.contains(s)).collect();
            forward.extend(frontier.iter().cloned());
        }
        prop_assert!(mixed.is_subset(&forward));
    }
}

#[test]
fn sync_update_consumes_the_partial_event() {
    let r = RProcess::initial(parse_process("a.b | ~a.c").unwrap()).split_normalize();
    let threads = r.threads();
    let (m1, m2) = (threads[0].0.clone(), threads[1].0.clone());
    let (_, after_a) = forward_steps(&r).into_iter().find(|(l, _)| l.memories == [m1.clone()]).unwrap();
    let (_, both) = forward_steps(&after_a).into_iter().find(|(l, _)| l.memories == [m2.clone()]).unwrap();
    let once = apply_sync_update(&both, &m1, &m2).unwrap();
    assert!(apply_sync_update(&once, &m1, &m2).is_err());
}
