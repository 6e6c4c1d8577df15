//! Greedy rewiring: walk the original graph's candidate pool best-first and
//! apply every candidate that is still feasible, until the budget is spent.

use crate::error::GraphError;
use crate::graph::{AssortativitySums, Graph};
use crate::rewiring::{
    apply_rewiring, best_candidate, enumerate_candidates_with, is_feasible, CandidatePool,
    EnumerationOptions, Execution, RewiringCandidate, Sign,
};

/// Direction of the attack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Raise `r` (maximum assortative rewiring).
    Assortative,
    /// Lower `r` (maximum disassortative rewiring).
    Disassortative,
}

impl Mode {
    pub fn sign(self) -> Sign {
        match self {
            Mode::Assortative => Sign::Positive,
            Mode::Disassortative => Sign::Negative,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceStep {
    /// 1-based count of applied rewirings.
    pub step: usize,
    /// Cumulative change in `p`.
    pub dp: i64,
    pub r: f64,
}

/// Outcome of any rewiring strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackResult {
    pub selected: Vec<RewiringCandidate>,
    pub trace: Vec<TraceStep>,
    pub initial_r: f64,
    pub final_r: f64,
    /// Fewer than `k` rewirings could be applied.
    pub pool_exhausted: bool,
}

impl AttackResult {
    pub fn dp(&self) -> i64 {
        self.trace.last().map_or(0, |s| s.dp)
    }

    pub fn pairs(&self) -> usize {
        self.selected.len()
    }
}

/// Accumulates an [`AttackResult`] as rewirings are applied.
#[derive(Debug)]
pub(crate) struct Tracker {
    base: AssortativitySums,
    initial_r: f64,
    dp: i64,
    selected: Vec<RewiringCandidate>,
    trace: Vec<TraceStep>,
}

impl Tracker {
    pub(crate) fn new(g: &Graph) -> Result<Self, GraphError> {
        let base = g.assortativity_sums()?;
        let initial_r = base.assortativity()?;
        Ok(Tracker {
            base,
            initial_r,
            dp: 0,
            selected: Vec::new(),
            trace: Vec::new(),
        })
    }

    pub(crate) fn record(&mut self, c: RewiringCandidate) {
        self.dp += c.value;
        self.selected.push(c);
        let r = self
            .base
            .r_with_delta(self.dp)
            .expect("denominator is invariant under rewiring");
        self.trace.push(TraceStep {
            step: self.selected.len(),
            dp: self.dp,
            r,
        });
    }

    pub(crate) fn len(&self) -> usize {
        self.selected.len()
    }

    pub(crate) fn finish(self, k: usize) -> AttackResult {
        let final_r = self.trace.last().map_or(self.initial_r, |s| s.r);
        AttackResult {
            pool_exhausted: self.selected.len() < k,
            selected: self.selected,
            trace: self.trace,
            initial_r: self.initial_r,
            final_r,
        }
    }
}

/// Greedy rewiring strategy on `g`, which is mutated in place.
///
/// Candidates come from the graph as passed in; a candidate skipped because
/// it was infeasible at its turn is never revisited.
pub fn greedy_attack(g: &mut Graph, k: usize, mode: Mode) -> Result<AttackResult, GraphError> {
    greedy_attack_with(g, k, mode, EnumerationOptions::default())
}

pub fn greedy_attack_with(
    g: &mut Graph,
    k: usize,
    mode: Mode,
    opts: EnumerationOptions,
) -> Result<AttackResult, GraphError> {
    let tracker = Tracker::new(g)?;
    if k == 0 {
        return Ok(tracker.finish(0));
    }
    let pool = enumerate_candidates_with(g, mode.sign(), opts);
    Ok(walk(g, &pool, k, tracker))
}

/// Greedy walk over a pool enumerated beforehand on this same graph.
///
/// Lets budget sweeps enumerate once and replay the walk per budget.
pub fn greedy_attack_with_pool(
    g: &mut Graph,
    pool: &CandidatePool,
    k: usize,
) -> Result<AttackResult, GraphError> {
    let tracker = Tracker::new(g)?;
    Ok(walk(g, pool, k, tracker))
}

fn walk(g: &mut Graph, pool: &CandidatePool, k: usize, mut tracker: Tracker) -> AttackResult {
    for c in pool.iter() {
        if tracker.len() >= k {
            break;
        }
        if is_feasible(g, &c) {
            apply_rewiring(g, &c).expect("feasibility checked");
            tracker.record(c);
        }
    }
    tracker.finish(k)
}

/// Greedy variant that re-enumerates candidates on the current graph after
/// every rewiring, so freshly created edges can be rewired again.
pub fn renew_greedy_attack(
    g: &mut Graph,
    k: usize,
    mode: Mode,
) -> Result<AttackResult, GraphError> {
    renew_greedy_attack_with(g, k, mode, Execution::default())
}

pub fn renew_greedy_attack_with(
    g: &mut Graph,
    k: usize,
    mode: Mode,
    execution: Execution,
) -> Result<AttackResult, GraphError> {
    let mut tracker = Tracker::new(g)?;
    while tracker.len() < k {
        let Some(c) = best_candidate(g, mode.sign(), execution) else {
            break;
        };
        apply_rewiring(g, &c).expect("fresh candidates are feasible");
        tracker.record(c);
    }
    Ok(tracker.finish(k))
}

/// Terminal `r` of an unlimited-budget renewing greedy run.
///
/// This is a degree-preserving local optimum: no single further rewiring
/// moves `r` in the requested direction. It is not a proven global extremum.
pub fn extremal_assortativity(g: &Graph, mode: Mode) -> Result<f64, GraphError> {
    let mut work = g.clone();
    let result = renew_greedy_attack(&mut work, usize::MAX, mode)?;
    Ok(result.final_r)
}
