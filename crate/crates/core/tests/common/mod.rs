#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use revccs_core::ccs::{operator_count, parse_process, Action, Channel, Process};

/// Hand-picked reference terms.
pub const REFERENCE_TERMS: [&str; 10] = [
    "0",
    "b",
    "a.b",
    "a.b | ~a.c",
    "a.b + ~a.c",
    "(a.b | ~a.c)\\a",
    "a.a | (~a + b)",
    "a.(b | c) | (~a | d)",
    "rec X. a.X",
    "((rec X. k?.X) | rec Y. (l!.Y + k!.Y))\\k",
];

pub const CORPUS_SEED: u64 = 0x05ee_dcc5;
pub const RANDOM_TERMS: usize = 15;
pub const MAX_OPERATORS: usize = 6;

fn ch(name: &str) -> Channel {
    Channel::new(name).unwrap()
}

fn random_action(rng: &mut impl Rng) -> Action {
    match rng.gen_range(0..7) {
        0 => Action::Input(ch("a")),
        1 => Action::Output(ch("a")),
        2 => Action::Input(ch("b")),
        3 => Action::Output(ch("b")),
        4 => Action::Input(ch("c")),
        5 => Action::Output(ch("c")),
        _ => Action::Tau,
    }
}

/// A closed, guarded term using at most `budget` operators. Recursion
/// variables only appear right after a prefix.
fn generate(rng: &mut impl Rng, budget: usize, vars: &[String], guarded: bool) -> Process {
    if guarded && !vars.is_empty() && (budget == 0 || rng.gen_bool(0.3)) {
        return Process::Var(vars[rng.gen_range(0..vars.len())].clone());
    }
    if budget == 0 {
        return Process::nil();
    }
    match rng.gen_range(0..10) {
        0..=3 => Process::prefix(random_action(rng), generate(rng, budget - 1, vars, true)),
        4 | 5 if budget >= 3 => {
            let left = budget - 3;
            let split = rng.gen_range(0..=left);
            Process::Sum(vec![
                (random_action(rng), generate(rng, split, vars, true)),
                (random_action(rng), generate(rng, left - split, vars, true)),
            ])
        }
        6 | 7 if budget >= 3 => {
            let left = budget - 1;
            let split = rng.gen_range(1..left);
            Process::par(generate(rng, split, vars, false), generate(rng, left - split, vars, false))
        }
        8 if budget >= 2 => {
            let c = if rng.gen_bool(0.5) { "a" } else { "b" };
            Process::restrict(generate(rng, budget - 1, vars, false), ch(c))
        }
        9 if budget >= 2 && vars.len() < 2 => {
            let var = if vars.is_empty() { "X" } else { "Y" }.to_string();
            let mut inner = vars.to_vec();
            inner.push(var.clone());
            let body = Process::prefix(random_action(rng), generate(rng, budget - 2, &inner, true));
            Process::rec(&var, body)
        }
        _ => Process::prefix(random_action(rng), generate(rng, budget - 1, vars, true)),
    }
}

/// Random closed guarded terms with at most `max_ops` operators, distinct
/// from each other, re-parsed from their rendering.
pub fn random_terms(seed: u64, count: usize, max_ops: usize) -> Vec<Process> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Process> = Vec::new();
    while out.len() < count {
        let budget = rng.gen_range(2..=max_ops);
        let p = generate(&mut rng, budget, &[], false);
        let p = parse_process(&p.to_string()).expect("rendered terms parse");
        if operator_count(&p) <= max_ops && !p.is_nil() && !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

/// The reference terms followed by the seeded random ones.
pub fn corpus() -> Vec<Process> {
    let mut out: Vec<Process> = REFERENCE_TERMS.iter().map(|t| parse_process(t).unwrap()).collect();
    out.extend(random_terms(CORPUS_SEED, RANDOM_TERMS, MAX_OPERATORS));
    out
}

/// A hand-written net over plain strings, used as an oracle independent of
/// the library's net representation.
pub struct OracleNet {
    pub initial: BTreeSet<&'static str>,
    pub transitions: Vec<(&'static str, Vec<&'static str>, Vec<&'static str>)>,
}

impl OracleNet {
    /// Forward transitions, plus their reverses when `reversible`.
    pub fn moves(&self, reversible: bool) -> Vec<(String, BTreeSet<&'static str>, BTreeSet<&'static str>)> {
        let mut out = Vec::new();
        for (name, pre, post) in &self.transitions {
            let pre: BTreeSet<_> = pre.iter().copied().collect();
            let post: BTreeSet<_> = post.iter().copied().collect();
            if reversible {
                out.push((format!("<-{name}"), post.clone(), pre.clone()));
            }
            out.push((format!("->{name}"), pre, post));
        }
        out
    }

    fn step(
        m: &BTreeSet<&'static str>,
        pre: &BTreeSet<&'static str>,
        post: &BTreeSet<&'static str>,
    ) -> Option<BTreeSet<&'static str>> {
        if !pre.is_subset(m) {
            return None;
        }
        let mut next: BTreeSet<_> = m.difference(pre).copied().collect();
        for p in post {
            assert!(next.insert(p), "oracle net is unsafe at {p}");
        }
        Some(next)
    }

    pub fn reachable(&self, depth: usize, reversible: bool) -> BTreeSet<BTreeSet<&'static str>> {
        let moves = self.moves(reversible);
        let mut seen = BTreeSet::from([self.initial.clone()]);
        let mut queue = VecDeque::from([(self.initial.clone(), 0)]);
        while let Some((m, d)) = queue.pop_front() {
            if d == depth {
                continue;
            }
            for (_, pre, post) in &moves {
                if let Some(next) = Self::step(&m, pre, post) {
                    if seen.insert(next.clone()) {
                        queue.push_back((next, d + 1));
                    }
                }
            }
        }
        seen
    }

    /// Nonempty firing sequences of length at most `depth`.
    pub fn sequences(&self, depth: usize, reversible: bool) -> usize {
        fn go(
            moves: &[(String, BTreeSet<&'static str>, BTreeSet<&'static str>)],
            m: &BTreeSet<&'static str>,
            left: usize,
        ) -> usize {
            if left == 0 {
                return 0;
            }
            moves
                .iter()
                .filter_map(|(_, pre, post)| OracleNet::step(m, pre, post))
                .map(|next| 1 + go(moves, &next, left - 1))
                .sum()
        }
        go(&self.moves(reversible), &self.initial, depth)
    }
}

/// The net of `a.b | ~a.c`, written out by hand.
pub fn oracle_par() -> OracleNet {
    OracleNet {
        initial: BTreeSet::from(["a.b", "~a.c"]),
        transitions: vec![
            ("a", vec!["a.b"], vec!["^a.b", "key a"]),
            ("b", vec!["^a.b"], vec!["^a^b", "key b"]),
            ("~a", vec!["~a.c"], vec!["^~a.c", "key ~a"]),
            ("c", vec!["^~a.c"], vec!["^~a^c", "key c"]),
            ("tau", vec!["a.b", "~a.c"], vec!["^a.b", "^~a.c", "key tau"]),
        ],
    }
}
