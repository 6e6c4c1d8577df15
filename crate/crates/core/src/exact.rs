//! Exact optimum of the rewiring problem.
//!
//! Selecting rewirings from the original graph's pool is a set packing
//! problem: each original edge may be consumed once, each new edge created
//! once, and at most `k` candidates chosen. Candidate values are constants,
//! so the objective is a plain sum and a depth-first branch-and-bound with a
//! partition-matroid bound, a Lagrangian bound and twin-node symmetry
//! breaking solve Karate- and Dolphin-sized instances in seconds.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use crate::error::{ExactError, GraphError};
use crate::graph::{Edge, Graph, NodeId};
use crate::greedy::{AttackResult, Mode, Tracker};
use crate::rewiring::{apply_rewiring, enumerate_candidates, CandidatePool, RewiringCandidate};

/// Subgradient steps per Lagrangian bound attempt.
const LAGRANGIAN_ROUNDS: usize = 30;

/// Candidate list plus its conflict groups.
///
/// `candidates` is in pool order (largest `|value|` first). Every candidate
/// index appears in exactly two original-edge groups and two new-edge groups.
#[derive(Debug, Clone)]
pub struct ExactProblem {
    pub mode: Mode,
    pub budget: usize,
    pub candidates: Vec<RewiringCandidate>,
    pub original_edge_conflicts: BTreeMap<Edge, Vec<usize>>,
    pub new_edge_conflicts: BTreeMap<Edge, Vec<usize>>,
    /// Classes of structurally equivalent nodes (same neighbors apart from
    /// each other), ascending. Swapping two members is a graph automorphism
    /// that maps the candidate list onto itself, which the solver uses to
    /// skip mirrored branches. Empty when the pool was capped.
    pub twin_classes: Vec<Vec<NodeId>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactSolution {
    /// Indices into the problem's candidate list, ascending.
    pub selected: Vec<usize>,
    /// Signed sum of the selected values.
    pub objective: i64,
    pub proven_optimal: bool,
    pub nodes_explored: u64,
}

impl ExactSolution {
    pub fn candidates(&self, problem: &ExactProblem) -> Vec<RewiringCandidate> {
        self.selected
            .iter()
            .map(|&i| problem.candidates[i])
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolverLimits {
    pub max_nodes: u64,
    pub time_limit: Duration,
}

impl Default for SolverLimits {
    fn default() -> Self {
        SolverLimits {
            max_nodes: 100_000_000,
            time_limit: Duration::from_secs(300),
        }
    }
}

pub fn build_exact_problem(g: &Graph, k: usize, mode: Mode) -> ExactProblem {
    let pool = enumerate_candidates(g, mode.sign());
    build_exact_problem_from_pool(&pool, k, mode)
}

pub fn build_exact_problem_from_pool(pool: &CandidatePool, k: usize, mode: Mode) -> ExactProblem {
    let candidates = pool.to_vec();
    let mut original_edge_conflicts: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
    let mut new_edge_conflicts: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
    for (i, c) in candidates.iter().enumerate() {
        for e in c.old_edges() {
            original_edge_conflicts.entry(e).or_default().push(i);
        }
        for e in c.new_edges() {
            new_edge_conflicts.entry(e).or_default().push(i);
        }
    }
    let twin_classes = if pool.is_truncated() {
        Vec::new()
    } else {
        twin_classes(pool.graph_edges())
    };
    ExactProblem {
        mode,
        budget: k,
        candidates,
        original_edge_conflicts,
        new_edge_conflicts,
        twin_classes,
    }
}

/// Groups non-isolated nodes by open neighborhood and by closed
/// neighborhood. The two kinds of class never overlap.
fn twin_classes(edges: &[Edge]) -> Vec<Vec<NodeId>> {
    let n = edges.iter().map(|e| e.1 as usize + 1).max().unwrap_or(0);
    let mut adj: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    for e in edges {
        adj[e.0 as usize].push(e.1);
        adj[e.1 as usize].push(e.0);
    }
    let mut classes = Vec::new();
    for closed in [false, true] {
        let mut by_key: BTreeMap<Vec<NodeId>, Vec<NodeId>> = BTreeMap::new();
        for (u, nbrs) in adj.iter().enumerate() {
            if nbrs.is_empty() {
                continue;
            }
            let mut key = nbrs.clone();
            if closed {
                key.push(u as NodeId);
            }
            key.sort_unstable();
            by_key.entry(key).or_default().push(u as NodeId);
        }
        classes.extend(by_key.into_values().filter(|c| c.len() > 1));
    }
    classes.sort();
    classes
}

impl ExactProblem {
    fn signed(&self, total: u64) -> i64 {
        match self.mode {
            Mode::Assortative => total as i64,
            Mode::Disassortative => -(total as i64),
        }
    }

    /// Upper bound on `|objective|` gained by picking at most `remaining`
    /// more candidates from index `from` onward, given `taken` already
    /// selected. This is the bound the solver prunes with.
    pub fn completion_bound(&self, taken: &[usize], from: usize, remaining: usize) -> u64 {
        let mut search = Search::new(self, SolverLimits::default());
        for &i in taken {
            search.take(i);
        }
        search.bound(from, remaining)
    }
}

/// Search state. Group ids cover original-edge groups first, then new-edge
/// groups.
struct Search {
    weights: Vec<u64>,
    groups: Vec<[u32; 4]>,
    /// Designation rules: each maps a candidate to one of its own groups,
    /// so the designated groups of a feasible set are pairwise distinct.
    designations: Vec<Vec<u32>>,
    used: Vec<bool>,
    stamp: Vec<u32>,
    lambda: Vec<f64>,
    cover: Vec<u32>,
    live: Vec<u32>,
    live_groups: Vec<u32>,
    reduced: Vec<(f64, u32)>,
    /// Endpoints of each candidate that belong to a twin class.
    twin_nodes: Vec<Vec<u32>>,
    twin_classes: Vec<Vec<u32>>,
    twin_caps: Vec<u32>,
    /// Picks touching each node.
    touches: Vec<u32>,
    epoch: u32,
    chosen: Vec<usize>,
    best: u64,
    best_set: Vec<usize>,
    nodes: u64,
    limits: SolverLimits,
    started: Instant,
    aborted: bool,
    budget: usize,
}

impl Search {
    fn new(p: &ExactProblem, limits: SolverLimits) -> Self {
        let mut id: BTreeMap<(bool, Edge), u32> = BTreeMap::new();
        let mut sizes = Vec::new();
        for (e, members) in &p.original_edge_conflicts {
            id.insert((false, *e), sizes.len() as u32);
            sizes.push(members.len());
        }
        for (e, members) in &p.new_edge_conflicts {
            id.insert((true, *e), sizes.len() as u32);
            sizes.push(members.len());
        }
        let groups: Vec<[u32; 4]> = p
            .candidates
            .iter()
            .map(|c| {
                let [a, b] = c.old_edges();
                let [x, y] = c.new_edges();
                [
                    id[&(false, a)],
                    id[&(false, b)],
                    id[&(true, x)],
                    id[&(true, y)],
                ]
            })
            .collect();
        // Largest group overall, largest new-edge group, largest
        // original-edge group. Large new-edge groups tend to be hub pairs.
        let designations = [0..4, 2..4, 0..2]
            .into_iter()
            .map(|range| {
                groups
                    .iter()
                    .map(|gs| {
                        *gs[range.clone()]
                            .iter()
                            .max_by_key(|&&g| (sizes[g as usize], g))
                            .unwrap()
                    })
                    .collect()
            })
            .collect();
        let n = p
            .twin_classes
            .iter()
            .flatten()
            .map(|&u| u as usize + 1)
            .max()
            .unwrap_or(0);
        let mut in_class = vec![false; n];
        p.twin_classes
            .iter()
            .flatten()
            .for_each(|&u| in_class[u as usize] = true);
        let twin_nodes = p
            .candidates
            .iter()
            .map(|c| {
                [c.edge_a.0, c.edge_a.1, c.edge_b.0, c.edge_b.1]
                    .into_iter()
                    .filter(|&u| (u as usize) < n && in_class[u as usize])
                    .collect()
            })
            .collect();
        Search {
            twin_nodes,
            twin_classes: p.twin_classes.clone(),
            twin_caps: p
                .twin_classes
                .iter()
                .map(|c| {
                    // Two members per old edge are only possible when some
                    // candidate removes an edge inside the class.
                    let inside = p
                        .original_edge_conflicts
                        .keys()
                        .any(|e| c.contains(&e.0) && c.contains(&e.1));
                    if inside {
                        4
                    } else {
                        2
                    }
                })
                .collect(),
            touches: vec![0; n],
            weights: p
                .candidates
                .iter()
                .map(|c| c.value.unsigned_abs())
                .collect(),
            groups,
            designations,
            lambda: vec![0.0; sizes.len()],
            cover: vec![0; sizes.len()],
            live: Vec::new(),
            live_groups: Vec::new(),
            reduced: Vec::new(),
            used: vec![false; sizes.len()],
            stamp: vec![0; sizes.len()],
            epoch: 0,
            chosen: Vec::new(),
            best: 0,
            best_set: Vec::new(),
            nodes: 0,
            limits,
            started: Instant::now(),
            aborted: false,
            budget: p.budget,
        }
    }

    #[inline]
    fn available(&self, i: usize) -> bool {
        self.groups[i].iter().all(|&g| !self.used[g as usize])
    }

    fn take(&mut self, i: usize) {
        for g in self.groups[i] {
            self.used[g as usize] = true;
        }
        for &u in &self.twin_nodes[i] {
            self.touches[u as usize] += 1;
        }
        self.chosen.push(i);
    }

    fn untake(&mut self) {
        let i = self.chosen.pop().expect("untake without take");
        for g in self.groups[i] {
            self.used[g as usize] = false;
        }
        for &u in &self.twin_nodes[i] {
            self.touches[u as usize] -= 1;
        }
    }

    /// Some optimum touches the members of every twin class in
    /// non-increasing amounts by id (permute each class to get one). Returns
    /// whether the current picks can still be completed to such a set. A
    /// pick adds at most four touches overall and, unless some candidate
    /// removes an edge inside the class, at most two within it.
    fn symmetry_feasible(&self) -> bool {
        let remaining = (self.budget - self.chosen.len()) as u32;
        let mut total = 0;
        for (class, &per_pick) in self.twin_classes.iter().zip(&self.twin_caps) {
            let mut later = 0u32;
            let mut deficit = 0;
            for &u in class.iter().rev() {
                let t = self.touches[u as usize];
                deficit += later.saturating_sub(t);
                later = later.max(t);
            }
            total += deficit;
            if deficit > per_pick * remaining || total > 4 * remaining {
                return false;
            }
        }
        true
    }

    /// Upper bound on the weight of `remaining` more picks at or after
    /// `from`: the smallest partition-matroid relaxation over the
    /// designation rules. Non-increasing in `from`.
    fn bound(&mut self, from: usize, remaining: usize) -> u64 {
        let mut best = u64::MAX;
        for rule in 0..self.designations.len() {
            best = best.min(self.designated_bound(rule, from, remaining));
        }
        best
    }

    fn next_epoch(&mut self) -> u32 {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        self.epoch
    }

    /// Max weight of `remaining` available candidates with pairwise
    /// distinct designated groups under `rule`. Any feasible completion
    /// satisfies that relaxation, and greedy solves it exactly because it
    /// is a truncated partition matroid.
    fn designated_bound(&mut self, rule: usize, from: usize, remaining: usize) -> u64 {
        let epoch = self.next_epoch();
        let designated = &self.designations[rule];
        let mut total = 0;
        let mut taken = 0;
        for j in from..self.weights.len() {
            if taken == remaining {
                break;
            }
            if !self.groups[j].iter().all(|&g| !self.used[g as usize]) {
                continue;
            }
            let d = designated[j] as usize;
            if self.stamp[d] == epoch {
                continue;
            }
            self.stamp[d] = epoch;
            total += self.weights[j];
            taken += 1;
        }
        total
    }

    /// Tries to show that no `remaining` further picks at or after `from`
    /// are worth more than `target`, by subgradient descent on the
    /// Lagrangian dual of the group constraints. Every non-negative
    /// multiplier vector gives a valid bound: a pick set worth `v` satisfies
    /// `v ≤ Σ λ_g + Σ (w_j − λ(j))⁺` over its best `remaining` members.
    /// Multipliers persist across calls as a warm start.
    fn lagrangian_prunes(&mut self, from: usize, remaining: usize, target: u64) -> bool {
        let epoch = self.next_epoch();
        self.live.clear();
        self.live_groups.clear();
        for j in from..self.weights.len() {
            if self.available(j) {
                self.live.push(j as u32);
                for g in self.groups[j] {
                    if self.stamp[g as usize] != epoch {
                        self.stamp[g as usize] = epoch;
                        self.live_groups.push(g);
                    }
                }
            }
        }
        if self.live.len() <= remaining {
            return false;
        }
        let target = target as f64 + 1.0 - 1e-6;
        let mut theta = 1.0;
        let mut last = f64::INFINITY;
        for _ in 0..LAGRANGIAN_ROUNDS {
            self.reduced.clear();
            for &j in &self.live {
                let gs = &self.groups[j as usize];
                let r = self.weights[j as usize] as f64
                    - gs.iter().map(|&g| self.lambda[g as usize]).sum::<f64>();
                self.reduced.push((r, j));
            }
            let k = remaining.min(self.reduced.len());
            self.reduced
                .select_nth_unstable_by(k - 1, |a, b| b.0.total_cmp(&a.0));
            let top = &self.reduced[..k];
            let inner: f64 = top.iter().map(|r| r.0.max(0.0)).sum();
            let total: f64 = inner
                + self
                    .live_groups
                    .iter()
                    .map(|&g| self.lambda[g as usize])
                    .sum::<f64>();
            if total < target {
                return true;
            }
            if total >= last {
                theta *= 0.5;
                if theta < 1.0 / 16.0 {
                    break;
                }
            }
            last = total;
            // Subgradient 1 − coverage on live groups, from the positive picks.
            for &g in &self.live_groups {
                self.cover[g as usize] = 0;
            }
            for &(r, j) in top {
                if r > 0.0 {
                    for g in self.groups[j as usize] {
                        self.cover[g as usize] += 1;
                    }
                }
            }
            let norm: f64 = self
                .live_groups
                .iter()
                .map(|&g| (1 - self.cover[g as usize] as i32).pow(2) as f64)
                .sum();
            if norm == 0.0 {
                break;
            }
            let step = theta * (total - target + 1.0) / norm;
            for &g in &self.live_groups {
                let sub = 1.0 - self.cover[g as usize] as f64;
                let l = &mut self.lambda[g as usize];
                *l = (*l - step * sub).max(0.0);
            }
        }
        false
    }

    fn over_limit(&mut self) -> bool {
        if self.nodes >= self.limits.max_nodes
            || (self.nodes.is_multiple_of(4096) && self.started.elapsed() > self.limits.time_limit)
        {
            self.aborted = true;
        }
        self.aborted
    }

    fn dfs(&mut self, from: usize, value: u64) {
        self.nodes += 1;
        if value > self.best {
            self.best = value;
            self.best_set = self.chosen.clone();
        }
        if self.chosen.len() == self.budget || self.over_limit() {
            return;
        }
        let remaining = self.budget - self.chosen.len();
        for j in from..self.weights.len() {
            if !self.available(j) {
                continue;
            }
            // Non-increasing in j: later starts see a subset of candidates.
            if value + self.bound(j, remaining) <= self.best {
                break;
            }
            self.take(j);
            let gained = value + self.weights[j];
            let left = remaining - 1;
            let viable = self.symmetry_feasible()
                && gained + self.bound(j + 1, left) > self.best
                && !(left > 1 && self.lagrangian_prunes(j + 1, left, self.best - gained));
            if viable {
                self.dfs(j + 1, gained);
            }
            self.untake();
            if self.aborted {
                return;
            }
        }
    }

    /// Walk in pool order taking every available candidate; the greedy
    /// rewiring result on the same pool.
    fn greedy_incumbent(&mut self) {
        let mut value = 0;
        for j in 0..self.weights.len() {
            if self.chosen.len() == self.budget {
                break;
            }
            if self.available(j) {
                self.take(j);
                value += self.weights[j];
            }
        }
        self.best = value;
        self.best_set = self.chosen.clone();
        while !self.chosen.is_empty() {
            self.untake();
        }
    }
}

pub fn solve_exact(p: &ExactProblem) -> ExactSolution {
    solve_exact_with(p, SolverLimits::default())
}

/// Branch-and-bound over candidates in `|value|`-descending order. When a
/// limit is hit the incumbent is returned with `proven_optimal = false`.
pub fn solve_exact_with(p: &ExactProblem, limits: SolverLimits) -> ExactSolution {
    let mut search = Search::new(p, limits);
    search.greedy_incumbent();
    if p.budget > 0 {
        search.dfs(0, 0);
    }
    let mut selected = search.best_set.clone();
    selected.sort_unstable();
    ExactSolution {
        selected,
        objective: p.signed(search.best),
        proven_optimal: !search.aborted,
        nodes_explored: search.nodes,
    }
}

/// Solves the exact problem for `g` and applies the optimal selection in
/// pool (value) order. The selection is conflict-free, so any order works.
pub fn exact_attack(
    g: &mut Graph,
    k: usize,
    mode: Mode,
    limits: SolverLimits,
) -> Result<(AttackResult, ExactSolution), GraphError> {
    let pool = enumerate_candidates(g, mode.sign());
    exact_attack_with_pool(g, &pool, k, mode, limits)
}

pub fn exact_attack_with_pool(
    g: &mut Graph,
    pool: &CandidatePool,
    k: usize,
    mode: Mode,
    limits: SolverLimits,
) -> Result<(AttackResult, ExactSolution), GraphError> {
    let mut tracker = Tracker::new(g)?;
    let problem = build_exact_problem_from_pool(pool, k, mode);
    let solution = solve_exact_with(&problem, limits);
    for c in solution.candidates(&problem) {
        apply_rewiring(g, &c).expect("exact selections are conflict-free");
        tracker.record(c);
    }
    Ok((tracker.finish(k), solution))
}

/// Subset count above which [`brute_force_optimum`] refuses to run.
pub const BRUTE_FORCE_LIMIT: u128 = 10_000_000;

/// Exhaustive optimum over all candidate subsets of size at most `k`,
/// checking conflicts pairwise on the edges themselves.
pub fn brute_force_optimum(g: &Graph, k: usize, mode: Mode) -> Result<ExactSolution, ExactError> {
    let pool = enumerate_candidates(g, mode.sign()).to_vec();
    let n = pool.len();
    let subsets = subsets_up_to(n as u128, k as u128);
    if subsets > BRUTE_FORCE_LIMIT {
        return Err(ExactError::TooLarge {
            subsets,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut best = (0i64, Vec::new());
    let mut chosen = Vec::new();
    let mut nodes = 0u64;
    rec(&pool, k, 0, &mut chosen, 0, &mut best, &mut nodes);
    Ok(ExactSolution {
        selected: best.1,
        objective: best.0,
        proven_optimal: true,
        nodes_explored: nodes,
    })
}

fn rec(
    pool: &[RewiringCandidate],
    k: usize,
    from: usize,
    chosen: &mut Vec<usize>,
    total: i64,
    best: &mut (i64, Vec<usize>),
    nodes: &mut u64,
) {
    *nodes += 1;
    if total.unsigned_abs() > best.0.unsigned_abs() {
        *best = (total, chosen.clone());
    }
    if chosen.len() == k {
        return;
    }
    for j in from..pool.len() {
        if chosen.iter().any(|&i| pool[i].conflicts_with(&pool[j])) {
            continue;
        }
        chosen.push(j);
        rec(pool, k, j + 1, chosen, total + pool[j].value, best, nodes);
        chosen.pop();
    }
}

fn subsets_up_to(n: u128, k: u128) -> u128 {
    let mut total = 1u128;
    let mut term = 1u128;
    for i in 0..k.min(n) {
        term = term * (n - i) / (i + 1);
        total = total.saturating_add(term);
        if total > BRUTE_FORCE_LIMIT * 10 {
            break;
        }
    }
    total
}
