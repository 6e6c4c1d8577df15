//! Helpers shared by the integration tests: data files, seeded random
//! graphs, an independent candidate enumerator and the property checks.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};
use std::path::PathBuf;

use assort_core::baselines::{
    degree_diff_rewiring, random_rewiring, target_rewiring, BaselineConfig,
};
use assort_core::exact::{exact_attack, SolverLimits};
use assort_core::greedy::{greedy_attack, renew_greedy_attack};
use assort_core::rewiring::{apply_rewiring, enumerate_candidates, is_feasible};
use assort_core::{AttackResult, Edge, Graph, GraphError, Mode, RewiringCandidate};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn data_file(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

pub fn load(name: &str) -> Graph {
    assort_core::io::read_edge_list(data_file(name))
        .expect("bundled data file")
        .graph
}

/// G(n, p) on exactly `n` nodes.
pub fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::with_nodes(n);
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if rng.gen_bool(p) {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

/// Sum of `deg(u)·deg(v)` over edges, recomputed from an edge list.
fn product_sum(edges: &HashSet<(u32, u32)>, degree: &[i64]) -> i64 {
    edges
        .iter()
        .map(|&(u, v)| degree[u as usize] * degree[v as usize])
        .sum()
}

/// A rewiring written as plain data: removed pair, created pair, change in
/// the degree-product sum.
pub type Move = ([(u32, u32); 2], [(u32, u32); 2], i64);

fn pair(u: u32, v: u32) -> (u32, u32) {
    (u.min(v), u.max(v))
}

/// Every degree-preserving swap of two edges into two absent edges, with
/// its effect measured by rebuilding the edge set. Written without the
/// library's move machinery.
pub fn oracle_moves(g: &Graph) -> Vec<Move> {
    let edges: Vec<(u32, u32)> = g.edges().iter().map(|e| pair(e.0, e.1)).collect();
    let set: HashSet<(u32, u32)> = edges.iter().copied().collect();
    let mut degree = vec![0i64; g.node_count()];
    for &(u, v) in &edges {
        degree[u as usize] += 1;
        degree[v as usize] += 1;
    }
    let before = product_sum(&set, &degree);
    let mut out = Vec::new();
    for (x, &(i, j)) in edges.iter().enumerate() {
        for &(k, l) in &edges[x + 1..] {
            if [k, l].contains(&i) || [k, l].contains(&j) {
                continue;
            }
            for (p, q) in [(pair(i, k), pair(j, l)), (pair(i, l), pair(j, k))] {
                if set.contains(&p) || set.contains(&q) {
                    continue;
                }
                let mut after = set.clone();
                after.remove(&(i, j));
                after.remove(&(k, l));
                after.insert(p);
                after.insert(q);
                let mut old = [(i, j), (k, l)];
                old.sort();
                let mut new = [p, q];
                new.sort();
                out.push((old, new, product_sum(&after, &degree) - before));
            }
        }
    }
    out.sort();
    out
}

pub fn as_move(c: &RewiringCandidate) -> Move {
    let mut old = c.old_edges().map(|e| (e.0, e.1));
    old.sort();
    let mut new = c.new_edges().map(|e| (e.0, e.1));
    new.sort();
    (old, new, c.value)
}

type Runner = Box<dyn Fn(&mut Graph) -> Result<AttackResult, GraphError>>;

/// Every strategy with a budget of `k`, on a copy of `g`.
pub fn run_all(
    g: &Graph,
    k: usize,
    seed: u64,
) -> Result<Vec<(String, Graph, AttackResult)>, GraphError> {
    let mut out = Vec::new();
    for mode in [Mode::Assortative, Mode::Disassortative] {
        let cfg = BaselineConfig::new(mode, k, seed);
        let mut runs: Vec<(&str, Runner)> = vec![
            ("greedy", Box::new(move |g| greedy_attack(g, k, mode))),
            ("renew", Box::new(move |g| renew_greedy_attack(g, k, mode))),
            ("target", Box::new(move |g| target_rewiring(g, &cfg))),
            ("random", Box::new(move |g| random_rewiring(g, &cfg))),
            ("diff", Box::new(move |g| degree_diff_rewiring(g, &cfg))),
        ];
        if k <= 2 {
            let limits = SolverLimits {
                max_nodes: 20_000,
                ..SolverLimits::default()
            };
            runs.push((
                "exact",
                Box::new(move |g| exact_attack(g, k, mode, limits).map(|r| r.0)),
            ));
        }
        for (name, run) in runs.drain(..) {
            let mut h = g.clone();
            let res = run(&mut h)?;
            out.push((format!("{name}/{mode:?}"), h, res));
        }
    }
    Ok(out)
}

/// Inputs for the property checks: a random graph plus a seed for choices
/// made inside the check.
#[derive(Debug, Clone)]
pub struct Case {
    pub graph: Graph,
    pub k: usize,
    pub seed: u64,
}

pub fn arb_case() -> impl Strategy<Value = Case> {
    (
        6usize..22,
        0.12f64..0.6,
        any::<u64>(),
        1usize..6,
        any::<u64>(),
    )
        .prop_filter_map("assortativity undefined", |(n, p, gseed, k, seed)| {
            let graph = gnp(n, p, gseed);
            graph.assortativity().ok().map(|_| Case { graph, k, seed })
        })
}

fn shuffled_pool(g: &Graph, seed: u64) -> Vec<RewiringCandidate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sign = if rng.gen_bool(0.5) {
        assort_core::Sign::Positive
    } else {
        assort_core::Sign::Negative
    };
    let mut pool = enumerate_candidates(g, sign).to_vec();
    pool.shuffle(&mut rng);
    pool
}

/// (a) Every strategy keeps every node's degree.
pub fn degrees_invariant(case: &Case) -> Result<(), TestCaseError> {
    let before = case.graph.degrees().to_vec();
    for (name, g, res) in
        run_all(&case.graph, case.k, case.seed).map_err(|e| TestCaseError::fail(e.to_string()))?
    {
        prop_assert_eq!(g.degrees(), &before[..], "{}", name);
        prop_assert_eq!(g.edge_count(), case.graph.edge_count(), "{}", name);
        prop_assert!(res.pairs() <= case.k, "{}", name);
    }
    Ok(())
}

/// (b) The change in `p` after any feasible sequence equals the sum of the
/// applied values, as integers.
pub fn dp_additive(case: &Case) -> Result<(), TestCaseError> {
    let mut g = case.graph.clone();
    let p0 = g.degree_product_sum();
    let mut total = 0;
    for c in shuffled_pool(&case.graph, case.seed)
        .iter()
        .take(4 * case.k)
    {
        if is_feasible(&g, c) {
            apply_rewiring(&mut g, c).unwrap();
            total += c.value;
            prop_assert_eq!(g.degree_product_sum() - p0, total);
        }
    }
    for (name, g, res) in
        run_all(&case.graph, case.k, case.seed).map_err(|e| TestCaseError::fail(e.to_string()))?
    {
        let sum: i64 = res.selected.iter().map(|c| c.value).sum();
        prop_assert_eq!(g.degree_product_sum() - p0, sum, "{}", name);
        prop_assert_eq!(res.dp(), sum, "{}", name);
    }
    Ok(())
}

/// (c) Greedy traces move `p` strictly in the attack direction at every step.
pub fn greedy_trace_monotone(case: &Case) -> Result<(), TestCaseError> {
    for mode in [Mode::Assortative, Mode::Disassortative] {
        for renew in [false, true] {
            let mut g = case.graph.clone();
            let res = if renew {
                renew_greedy_attack(&mut g, case.k, mode)
            } else {
                greedy_attack(&mut g, case.k, mode)
            }
            .unwrap();
            let mut prev = (0i64, res.initial_r);
            for s in &res.trace {
                match mode {
                    Mode::Assortative => prop_assert!(s.dp > prev.0 && s.r > prev.1),
                    Mode::Disassortative => prop_assert!(s.dp < prev.0 && s.r < prev.1),
                }
                prev = (s.dp, s.r);
            }
        }
    }
    Ok(())
}

/// (d) A candidate's value does not depend on which feasible rewirings ran
/// before it: degrees never change.
pub fn marginal_gain_constant(case: &Case) -> Result<(), TestCaseError> {
    let pool = shuffled_pool(&case.graph, case.seed);
    let Some((&target, rest)) = pool.split_first() else {
        return Ok(());
    };
    let mut g = case.graph.clone();
    for c in rest.iter().take(3 * case.k) {
        if !c.conflicts_with(&target) && is_feasible(&g, c) {
            apply_rewiring(&mut g, c).unwrap();
            if !is_feasible(&g, &target) {
                // The move created one of the target's new edges; undo it.
                apply_rewiring(&mut g, &c.reversed()).unwrap();
                continue;
            }
            let now =
                RewiringCandidate::evaluate(&g, target.edge_a, target.edge_b, target.orientation);
            prop_assert_eq!(now.value, target.value);
        }
    }
    if is_feasible(&g, &target) {
        let p = g.degree_product_sum();
        apply_rewiring(&mut g, &target).unwrap();
        prop_assert_eq!(g.degree_product_sum() - p, target.value);
    }
    Ok(())
}

/// (e) Greedy and exact selections never consume an original edge twice,
/// never create the same edge twice and never touch edges they created.
/// The live-graph strategies may legitimately rewire an edge again after
/// recreating it, so they are not checked.
pub fn selections_disjoint(case: &Case) -> Result<(), TestCaseError> {
    let original: BTreeSet<Edge> = case.graph.edges().iter().copied().collect();
    for (name, _, res) in
        run_all(&case.graph, case.k, case.seed).map_err(|e| TestCaseError::fail(e.to_string()))?
    {
        if !(name.starts_with("greedy") || name.starts_with("exact")) {
            continue;
        }
        let mut removed = BTreeSet::new();
        let mut created = BTreeSet::new();
        for c in &res.selected {
            for e in c.old_edges() {
                prop_assert!(removed.insert(e), "{} removes {} twice", name, e);
                prop_assert!(original.contains(&e), "{} rewires created edge {}", name, e);
            }
            for e in c.new_edges() {
                prop_assert!(created.insert(e), "{} creates {} twice", name, e);
                prop_assert!(
                    !original.contains(&e),
                    "{} recreates original edge {}",
                    name,
                    e
                );
            }
        }
    }
    Ok(())
}
