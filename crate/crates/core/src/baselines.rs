//! Comparison strategies: targeted, random and degree-difference rewiring.
//!
//! All three rewire the live graph. Given two endpoint-disjoint edges, the
//! four endpoints are ranked by degree `k1 ≥ k2 ≥ k3 ≥ k4` (ties by node
//! id) and reconnected as `(k1, k2), (k3, k4)` for the assortative mode or
//! `(k1, k4), (k2, k3)` for the disassortative mode.

use std::cmp::Reverse;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::GraphError;
use crate::graph::{Edge, Graph};
use crate::greedy::{AttackResult, Mode, Tracker};
use crate::rewiring::{apply_rewiring, RewiringCandidate};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineConfig {
    pub mode: Mode,
    pub budget_pairs: usize,
    pub rng_seed: u64,
    /// Share of the diff-sorted edge list sampled by degree-difference
    /// rewiring.
    pub diff_fraction: f64,
    /// Draw limit for the sampling strategies; `None` means `100 · k`.
    pub max_attempts: Option<usize>,
}

impl BaselineConfig {
    pub fn new(mode: Mode, budget_pairs: usize, rng_seed: u64) -> Self {
        BaselineConfig {
            mode,
            budget_pairs,
            rng_seed,
            diff_fraction: 0.3,
            max_attempts: None,
        }
    }

    fn attempts(&self) -> usize {
        self.max_attempts.unwrap_or(100 * self.budget_pairs)
    }
}

/// The reconnection of `a` and `b` prescribed by the degree-ranking rule,
/// or `None` if the endpoints overlap or a new edge already exists.
pub fn degree_rule_rewiring(g: &Graph, a: Edge, b: Edge, mode: Mode) -> Option<RewiringCandidate> {
    if a == b || a.shares_endpoint(&b) {
        return None;
    }
    let mut nodes = [a.0, a.1, b.0, b.1];
    nodes.sort_by_key(|&u| (Reverse(g.degree(u)), u));
    let [n1, n2, n3, n4] = nodes;
    let new = match mode {
        Mode::Assortative => [Edge::new(n1, n2), Edge::new(n3, n4)],
        Mode::Disassortative => [Edge::new(n1, n4), Edge::new(n2, n3)],
    };
    if new.iter().any(|&e| g.contains(e)) {
        return None;
    }
    RewiringCandidate::from_reconnection(g, [a, b], new)
}

/// Random rewiring: draw two distinct edges uniformly, reconnect them by the
/// degree rule when feasible, otherwise redraw.
pub fn random_rewiring(g: &mut Graph, cfg: &BaselineConfig) -> Result<AttackResult, GraphError> {
    let mut tracker = Tracker::new(g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let m = g.edge_count();
    if m >= 2 {
        for _ in 0..cfg.attempts() {
            if tracker.len() >= cfg.budget_pairs {
                break;
            }
            let i = rng.gen_range(0..m);
            let j = rng.gen_range(0..m - 1);
            let j = if j >= i { j + 1 } else { j };
            let (a, b) = (g.edges()[i], g.edges()[j]);
            if let Some(c) = degree_rule_rewiring(g, a, b, cfg.mode) {
                apply_rewiring(g, &c).expect("rule output is feasible");
                tracker.record(c);
            }
        }
    }
    Ok(tracker.finish(cfg.budget_pairs))
}

/// Targeted rewiring: edges ranked by their larger endpoint degree (then by
/// endpoint degree sum, then lexicographically). The best unused edge is
/// paired with the next unused edge that admits a feasible degree-rule
/// reconnection; an edge with no such partner is dropped.
pub fn target_rewiring(g: &mut Graph, cfg: &BaselineConfig) -> Result<AttackResult, GraphError> {
    let mut tracker = Tracker::new(g)?;
    let mut ranked = g.edges().to_vec();
    ranked.sort_by_key(|e| {
        let (du, dv) = (g.degree(e.0), g.degree(e.1));
        (Reverse(du.max(dv)), Reverse(du + dv), *e)
    });
    let mut used = vec![false; ranked.len()];
    let mut head = 0;
    while tracker.len() < cfg.budget_pairs {
        while head < ranked.len() && used[head] {
            head += 1;
        }
        if head == ranked.len() {
            break;
        }
        used[head] = true;
        let first = ranked[head];
        let partner = (head + 1..ranked.len())
            .filter(|&j| !used[j])
            .find_map(|j| degree_rule_rewiring(g, first, ranked[j], cfg.mode).map(|c| (j, c)));
        if let Some((j, c)) = partner {
            used[j] = true;
            apply_rewiring(g, &c).expect("rule output is feasible");
            tracker.record(c);
        }
    }
    Ok(tracker.finish(cfg.budget_pairs))
}

/// Degree-difference rewiring: edges sorted by `|deg(u) − deg(v)|`
/// descending. The assortative mode samples pairs from the head of that
/// list, the disassortative mode from its tail.
pub fn degree_diff_rewiring(
    g: &mut Graph,
    cfg: &BaselineConfig,
) -> Result<AttackResult, GraphError> {
    let mut tracker = Tracker::new(g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let key = |g: &Graph, e: Edge| (Reverse(g.degree(e.0).abs_diff(g.degree(e.1))), e);
    let mut ranked: Vec<(Reverse<u32>, Edge)> = g.edges().iter().map(|&e| key(g, e)).collect();
    ranked.sort_unstable();
    let m = ranked.len();
    let window = ((cfg.diff_fraction * m as f64).floor() as usize)
        .max(2)
        .min(m);
    let offset = match cfg.mode {
        Mode::Assortative => 0,
        Mode::Disassortative => m - window,
    };
    if window >= 2 {
        for _ in 0..cfg.attempts() {
            if tracker.len() >= cfg.budget_pairs {
                break;
            }
            let i = rng.gen_range(0..window);
            let j = rng.gen_range(0..window - 1);
            let j = if j >= i { j + 1 } else { j };
            let (a, b) = (ranked[offset + i].1, ranked[offset + j].1);
            let Some(c) = degree_rule_rewiring(g, a, b, cfg.mode) else {
                continue;
            };
            for e in c.old_edges() {
                let at = ranked
                    .binary_search(&key(g, e))
                    .expect("ranked list tracks the graph");
                ranked.remove(at);
            }
            for e in c.new_edges() {
                let k = key(g, e);
                let at = ranked.binary_search(&k).unwrap_err();
                ranked.insert(at, k);
            }
            apply_rewiring(g, &c).expect("rule output is feasible");
            tracker.record(c);
        }
    }
    Ok(tracker.finish(cfg.budget_pairs))
}
