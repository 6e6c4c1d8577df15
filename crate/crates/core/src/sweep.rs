//! Budget sweeps: every strategy at every budget fraction, with repeated
//! runs for the stochastic baselines, reduced to per-run and aggregate rows.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::baselines::{degree_diff_rewiring, random_rewiring, target_rewiring, BaselineConfig};
use crate::error::GraphError;
use crate::exact::{exact_attack_with_pool, SolverLimits};
use crate::graph::Graph;
use crate::greedy::{greedy_attack_with_pool, renew_greedy_attack, AttackResult, Mode};
use crate::io::SweepRecord;
#[cfg(feature = "parallel")]
use crate::rewiring::Execution;
use crate::rewiring::{enumerate_candidates_with, CandidatePool, EnumerationOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Greedy(Mode),
    RenewGreedy(Mode),
    Exact(Mode),
    Target(Mode),
    Random(Mode),
    DegreeDiff(Mode),
}

impl Strategy {
    pub const ALL: [Strategy; 12] = [
        Strategy::Greedy(Mode::Assortative),
        Strategy::Greedy(Mode::Disassortative),
        Strategy::RenewGreedy(Mode::Assortative),
        Strategy::RenewGreedy(Mode::Disassortative),
        Strategy::Exact(Mode::Assortative),
        Strategy::Exact(Mode::Disassortative),
        Strategy::Target(Mode::Assortative),
        Strategy::Target(Mode::Disassortative),
        Strategy::Random(Mode::Assortative),
        Strategy::Random(Mode::Disassortative),
        Strategy::DegreeDiff(Mode::Assortative),
        Strategy::DegreeDiff(Mode::Disassortative),
    ];

    pub fn id(self) -> &'static str {
        use Mode::{Assortative as A, Disassortative as D};
        match self {
            Strategy::Greedy(A) => "gars",
            Strategy::Greedy(D) => "gdrs",
            Strategy::RenewGreedy(A) => "renew-gars",
            Strategy::RenewGreedy(D) => "renew-gdrs",
            Strategy::Exact(A) => "exact",
            Strategy::Exact(D) => "exact-dis",
            Strategy::Target(A) => "tars",
            Strategy::Target(D) => "tdrs",
            Strategy::Random(A) => "rars",
            Strategy::Random(D) => "rdrs",
            Strategy::DegreeDiff(A) => "dars",
            Strategy::DegreeDiff(D) => "ddrs",
        }
    }

    pub fn mode(self) -> Mode {
        match self {
            Strategy::Greedy(m)
            | Strategy::RenewGreedy(m)
            | Strategy::Exact(m)
            | Strategy::Target(m)
            | Strategy::Random(m)
            | Strategy::DegreeDiff(m) => m,
        }
    }

    pub fn is_stochastic(self) -> bool {
        matches!(self, Strategy::Random(_) | Strategy::DegreeDiff(_))
    }

    /// Whether the strategy walks the original graph's candidate pool.
    pub fn uses_pool(self) -> bool {
        matches!(self, Strategy::Greedy(_) | Strategy::Exact(_))
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.to_ascii_lowercase();
        Strategy::ALL
            .into_iter()
            .find(|st| st.id() == s)
            .ok_or_else(|| format!("unknown strategy {s:?}"))
    }
}

/// Rewired pairs for a fraction `f` of the `m` edges: `floor(f·m/2)`, so
/// that `f·m` edges are touched.
pub fn pairs_for_fraction(fraction: f64, edge_count: usize) -> usize {
    (fraction * edge_count as f64 / 2.0 + 1e-9).floor().max(0.0) as usize
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Seed of one sweep run. It depends only on the master seed, the strategy
/// id, the fraction and the run index, so adding strategies or fractions to
/// a sweep leaves existing rows unchanged.
pub fn run_seed(master: u64, strategy: Strategy, fraction: f64, run: usize) -> u64 {
    let s = splitmix64(master ^ fnv1a(strategy.id()));
    let s = splitmix64(s ^ fraction.to_bits());
    splitmix64(s ^ run as u64)
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub strategies: Vec<Strategy>,
    pub fractions: Vec<f64>,
    /// Runs per stochastic strategy; deterministic ones run once.
    pub runs: usize,
    pub master_seed: u64,
    /// Record wall-clock times. Off makes the CSV byte-reproducible.
    pub timing: bool,
    pub enumeration: EnumerationOptions,
    pub exact_limits: SolverLimits,
}

/// Default budget fractions: 1% to 10% of the edges in 1% steps.
pub fn default_fractions() -> Vec<f64> {
    (1..=10).map(|i| i as f64 / 100.0).collect()
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            strategies: Strategy::ALL
                .into_iter()
                .filter(|s| !matches!(s, Strategy::Exact(_) | Strategy::RenewGreedy(_)))
                .collect(),
            fractions: default_fractions(),
            runs: 100,
            master_seed: 0,
            timing: true,
            enumeration: EnumerationOptions::default(),
            exact_limits: SolverLimits::default(),
        }
    }
}

struct Job {
    strategy: Strategy,
    fraction: f64,
    run: usize,
    seed: u64,
}

/// Runs one strategy on a copy of `g` at budget `k`. `pool` must be the
/// graph's pool for the strategy's mode when the strategy walks a pool.
pub fn run_strategy(
    g: &Graph,
    strategy: Strategy,
    k: usize,
    seed: u64,
    pool: Option<&CandidatePool>,
    limits: SolverLimits,
) -> Result<(AttackResult, String), GraphError> {
    let mut work = g.clone();
    let mode = strategy.mode();
    let baseline = BaselineConfig::new(mode, k, seed);
    let owned;
    let pool = match (strategy.uses_pool(), pool) {
        (true, Some(p)) => Some(p),
        (true, None) => {
            owned = enumerate_candidates_with(g, mode.sign(), EnumerationOptions::default());
            Some(&owned)
        }
        _ => None,
    };
    let (res, optimal) = match strategy {
        Strategy::Greedy(_) => (greedy_attack_with_pool(&mut work, pool.unwrap(), k)?, true),
        Strategy::RenewGreedy(_) => (renew_greedy_attack(&mut work, k, mode)?, true),
        Strategy::Exact(_) => {
            let (res, sol) = exact_attack_with_pool(&mut work, pool.unwrap(), k, mode, limits)?;
            (res, sol.proven_optimal)
        }
        Strategy::Target(_) => (target_rewiring(&mut work, &baseline)?, true),
        Strategy::Random(_) => (random_rewiring(&mut work, &baseline)?, true),
        Strategy::DegreeDiff(_) => (degree_diff_rewiring(&mut work, &baseline)?, true),
    };
    let status = if !optimal {
        "non-optimal"
    } else if res.pool_exhausted {
        "exhausted"
    } else {
        "ok"
    };
    Ok((res, status.to_string()))
}

/// Per-run rows followed, for every `(strategy, fraction)`, by a mean row
/// (`run = -1`) and a standard-deviation row (`run = -2`). Row order is
/// strategy order, then fraction order, then run index.
pub fn run_sweep(g: &Graph, cfg: &SweepConfig) -> Result<Vec<SweepRecord>, GraphError> {
    let r_initial = g.assortativity()?;
    let m = g.edge_count();

    let mut pools: HashMap<Mode, CandidatePool> = HashMap::new();
    for s in &cfg.strategies {
        if s.uses_pool() && !pools.contains_key(&s.mode()) {
            let max_k = cfg
                .fractions
                .iter()
                .map(|&f| pairs_for_fraction(f, m))
                .max()
                .unwrap_or(0);
            if max_k > 0 {
                pools.insert(
                    s.mode(),
                    enumerate_candidates_with(g, s.mode().sign(), cfg.enumeration),
                );
            }
        }
    }

    let mut jobs = Vec::new();
    for &strategy in &cfg.strategies {
        let runs = if strategy.is_stochastic() {
            cfg.runs.max(1)
        } else {
            1
        };
        for &fraction in &cfg.fractions {
            for run in 0..runs {
                let seed = if strategy.is_stochastic() {
                    run_seed(cfg.master_seed, strategy, fraction, run)
                } else {
                    0
                };
                jobs.push(Job {
                    strategy,
                    fraction,
                    run,
                    seed,
                });
            }
        }
    }

    let execute = |job: &Job| -> SweepRecord {
        let k = pairs_for_fraction(job.fraction, m);
        let started = Instant::now();
        let outcome = if k == 0 {
            Ok((None, "ok".to_string()))
        } else {
            run_strategy(
                g,
                job.strategy,
                k,
                job.seed,
                pools.get(&job.strategy.mode()),
                cfg.exact_limits,
            )
            .map(|(res, status)| (Some(res), status))
        };
        let wall_ms = if cfg.timing {
            started.elapsed().as_millis() as u64
        } else {
            0
        };
        let (r_final, dp, status) = match outcome {
            Ok((Some(res), status)) => (res.final_r, res.dp(), status),
            Ok((None, status)) => (r_initial, 0, status),
            Err(e) => (f64::NAN, 0, format!("error: {e}")),
        };
        SweepRecord {
            strategy: job.strategy.id().to_string(),
            fraction: job.fraction,
            pairs: k,
            run: job.run as i64,
            seed: job.seed,
            r_initial,
            r_final,
            dp,
            wall_ms,
            status,
        }
    };

    // Jobs follow the enumeration execution choice, so a sequential
    // configuration is sequential end to end.
    #[cfg(feature = "parallel")]
    let rows: Vec<SweepRecord> = if cfg.enumeration.execution == Execution::Parallel {
        use rayon::prelude::*;
        jobs.par_iter().map(execute).collect()
    } else {
        jobs.iter().map(execute).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<SweepRecord> = jobs.iter().map(execute).collect();

    let mut out = Vec::with_capacity(rows.len() + 2 * cfg.strategies.len() * cfg.fractions.len());
    let mut start = 0;
    while start < rows.len() {
        let end = (start..rows.len())
            .find(|&i| {
                rows[i].strategy != rows[start].strategy || rows[i].fraction != rows[start].fraction
            })
            .unwrap_or(rows.len());
        let group = &rows[start..end];
        out.extend_from_slice(group);
        out.extend(aggregate(group));
        start = end;
    }
    Ok(out)
}

fn aggregate(group: &[SweepRecord]) -> [SweepRecord; 2] {
    let ok: Vec<&SweepRecord> = group
        .iter()
        .filter(|r| !r.status.starts_with("error"))
        .collect();
    let n = ok.len() as f64;
    let mean = ok.iter().map(|r| r.r_final).sum::<f64>() / n;
    let var = if ok.len() > 1 {
        ok.iter().map(|r| (r.r_final - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let mean_dp = (ok.iter().map(|r| r.dp as f64).sum::<f64>() / n).round() as i64;
    let first = &group[0];
    let row = |run, r_final, dp, status: &str| SweepRecord {
        strategy: first.strategy.clone(),
        fraction: first.fraction,
        pairs: first.pairs,
        run,
        seed: 0,
        r_initial: first.r_initial,
        r_final,
        dp,
        wall_ms: group.iter().map(|r| r.wall_ms).sum(),
        status: status.to_string(),
    };
    [
        row(-1, mean, mean_dp, "mean"),
        row(-2, var.sqrt(), 0, "std"),
    ]
}

/// Mean `r_final` row of a sweep for `(strategy, fraction)`.
pub fn mean_r_final(records: &[SweepRecord], strategy: Strategy, fraction: f64) -> Option<f64> {
    records
        .iter()
        .find(|r| {
            r.run == -1 && r.strategy == strategy.id() && (r.fraction - fraction).abs() < 1e-12
        })
        .map(|r| r.r_final)
}
