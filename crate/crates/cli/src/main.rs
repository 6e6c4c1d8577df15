use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use assort_core::exact::{
    brute_force_optimum, build_exact_problem_from_pool, solve_exact_with, SolverLimits,
};
use assort_core::generators::{generate, GeneratorSpec, Model};
use assort_core::greedy::{extremal_assortativity, greedy_attack_with_pool};
use assort_core::io::{format_edge_list, read_edge_list, write_csv, write_csv_to, LabeledGraph};
use assort_core::rewiring::{enumerate_candidates_with, EnumerationOptions};
use assort_core::sweep::{
    default_fractions, pairs_for_fraction, run_strategy, run_sweep, Strategy, SweepConfig,
};
use assort_core::{AttackResult, Graph, Mode};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "assort",
    version,
    about = "Degree-preserving rewiring attacks on assortativity"
)]
struct Cli {
    /// Seed for generators and stochastic strategies.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Keep only the best N rewiring candidates when enumerating.
    #[arg(long, global = true, value_name = "N")]
    max_candidates: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Node count, edge count, mean degree and assortativity of edge lists.
    Stats {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Also report the largest and smallest r reachable by repeated
        /// best-move rewiring (a local optimum).
        #[arg(long)]
        extremal: bool,
    },
    /// Write a seeded random graph as an edge list.
    Generate {
        /// er:N:M, ws:N:K[:BETA] or ba:N:M
        model: Model,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run one strategy and write the rewired graph and its trace.
    Attack {
        /// `INPUT STRATEGY`, or just `STRATEGY` with --generate.
        #[arg(required = true, num_args = 1..=2, value_name = "INPUT|STRATEGY")]
        args: Vec<String>,
        /// Use a generated graph instead of an input file.
        #[arg(long, value_name = "MODEL")]
        generate: Option<Model>,
        #[command(flatten)]
        budget: Budget,
        /// Rewired edge list destination.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Per-step CSV (step,dp,r) destination.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Exact optimum next to the greedy result, optionally for every
    /// budget up to the given one.
    Exact {
        input: PathBuf,
        #[command(flatten)]
        budget: Budget,
        #[arg(long, value_enum, default_value_t = ModeArg::Assortative)]
        mode: ModeArg,
        /// Report every budget from 1 up to the requested one.
        #[arg(long)]
        each: bool,
        /// Search node limit.
        #[arg(long, default_value_t = SolverLimits::default().max_nodes)]
        node_limit: u64,
        /// Search time limit in seconds.
        #[arg(long, default_value_t = SolverLimits::default().time_limit.as_secs_f64())]
        time_limit: f64,
        /// Cross-check against exhaustive subset enumeration (tiny graphs).
        #[arg(long)]
        brute_force: bool,
    },
    /// Every strategy at every budget fraction; writes per-run and
    /// aggregate CSV rows.
    Sweep {
        /// Edge-list files.
        inputs: Vec<PathBuf>,
        /// Generated inputs, repeatable.
        #[arg(long = "generate", value_name = "MODEL")]
        models: Vec<Model>,
        /// Comma-separated strategy ids; default excludes the exact and
        /// renew strategies.
        #[arg(long, value_delimiter = ',')]
        strategies: Option<Vec<Strategy>>,
        /// Comma-separated budget fractions; default 0.01..0.10.
        #[arg(long, value_delimiter = ',')]
        fractions: Option<Vec<f64>>,
        /// Runs per stochastic strategy.
        #[arg(long, default_value_t = 100)]
        runs: usize,
        /// CSV destination. With several inputs, one file per input named
        /// `<stem>-<input>.csv`. Stdout when omitted and there is one input.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write 0 in wall_ms so reruns produce identical bytes.
        #[arg(long)]
        no_timing: bool,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Budget {
    /// Number of rewired edge pairs.
    #[arg(long)]
    pairs: Option<usize>,
    /// Fraction of edges to rewire; pairs = floor(f·M/2).
    #[arg(long)]
    fraction: Option<f64>,
}

impl Budget {
    fn pairs(&self, g: &Graph) -> Result<usize> {
        match (self.pairs, self.fraction) {
            (Some(k), _) => Ok(k),
            (None, Some(f)) if (0.0..=1.0).contains(&f) => {
                Ok(pairs_for_fraction(f, g.edge_count()))
            }
            (None, Some(f)) => bail!("fraction {f} outside [0, 1]"),
            (None, None) => unreachable!("clap requires one budget flag"),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Assortative,
    Disassortative,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Assortative => Mode::Assortative,
            ModeArg::Disassortative => Mode::Disassortative,
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        // A closed downstream pipe (`| head`) is not a failure.
        if e.chain().any(|c| {
            c.downcast_ref::<io::Error>()
                .is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)
        }) {
            return;
        }
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    let opts = EnumerationOptions {
        max_candidates: cli.max_candidates,
        ..Default::default()
    };
    match cli.command {
        Command::Stats { inputs, extremal } => stats(&inputs, extremal, cli.json),
        Command::Generate { model, output } => {
            let g = generate(&GeneratorSpec::new(model, cli.seed))?;
            let lg = LabeledGraph::unlabeled(g);
            write_to(output.as_deref(), |mut w| {
                Ok(format_edge_list(&lg, &mut w)?)
            })
        }
        Command::Attack {
            args,
            generate: model,
            budget,
            output,
            trace,
        } => {
            let (lg, strategy) = match (model, args.as_slice()) {
                (Some(m), [s]) => (
                    LabeledGraph::unlabeled(generate(&GeneratorSpec::new(m, cli.seed))?),
                    s,
                ),
                (None, [input, s]) => (read_input(Path::new(input))?, s),
                (Some(_), _) => bail!("with --generate, give only the strategy"),
                (None, _) => bail!("expected INPUT STRATEGY"),
            };
            let strategy: Strategy = strategy.parse().map_err(anyhow::Error::msg)?;
            attack(
                lg,
                strategy,
                &budget,
                opts,
                cli.seed,
                output.as_deref(),
                trace.as_deref(),
                cli.json,
            )
        }
        Command::Exact {
            input,
            budget,
            mode,
            each,
            node_limit,
            time_limit,
            brute_force,
        } => {
            let limits = SolverLimits {
                max_nodes: node_limit,
                time_limit: Duration::from_secs_f64(time_limit),
            };
            let g = read_input(&input)?.graph;
            exact(
                &g,
                &budget,
                mode.into(),
                each,
                limits,
                brute_force,
                opts,
                cli.json,
            )
        }
        Command::Sweep {
            inputs,
            models,
            strategies,
            fractions,
            runs,
            output,
            no_timing,
        } => {
            let cfg = SweepConfig {
                strategies: strategies.unwrap_or_else(|| SweepConfig::default().strategies),
                fractions: fractions.unwrap_or_else(default_fractions),
                runs,
                master_seed: cli.seed,
                timing: !no_timing,
                enumeration: opts,
                ..SweepConfig::default()
            };
            sweep(
                &inputs,
                &models,
                &cfg,
                output.as_deref(),
                cli.seed,
                cli.json,
            )
        }
    }
}

fn read_input(path: &Path) -> Result<LabeledGraph> {
    read_edge_list(path).with_context(|| format!("reading {}", path.display()))
}

fn write_to(path: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let file = File::create(p).with_context(|| format!("creating {}", p.display()))?;
            let mut w = BufWriter::new(file);
            body(&mut w)?;
            w.flush()
                .with_context(|| format!("writing {}", p.display()))
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            body(&mut w)?;
            Ok(w.flush()?)
        }
    }
}

fn r_or_null(r: Option<f64>) -> serde_json::Value {
    r.map_or(serde_json::Value::Null, |r| json!(r))
}

fn fmt_r(r: Option<f64>) -> String {
    r.map_or_else(|| "undefined".to_string(), |r| format!("{r:.4}"))
}

fn stats(inputs: &[PathBuf], extremal: bool, as_json: bool) -> Result<()> {
    let mut rows = Vec::new();
    for path in inputs {
        let g = read_input(path)?.graph;
        let r = g.assortativity().ok();
        let (r_max, r_min) = if extremal && r.is_some() {
            (
                Some(extremal_assortativity(&g, Mode::Assortative)?),
                Some(extremal_assortativity(&g, Mode::Disassortative)?),
            )
        } else {
            (None, None)
        };
        rows.push((path.display().to_string(), g, r, r_max, r_min));
    }
    if as_json {
        let out: Vec<_> = rows
            .iter()
            .map(|(name, g, r, r_max, r_min)| {
                let mut v = json!({
                    "network": name,
                    "nodes": g.node_count(),
                    "edges": g.edge_count(),
                    "mean_degree": g.mean_degree(),
                    "r": r_or_null(*r),
                });
                if extremal {
                    v["r_max"] = r_or_null(*r_max);
                    v["r_min"] = r_or_null(*r_min);
                }
                v
            })
            .collect();
        println!("{}", serde_json::to_string_pretty(&out)?);
        return Ok(());
    }
    let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(7).max(7);
    let extra = if extremal {
        format!(" {:>8} {:>8}", "r_max", "r_min")
    } else {
        String::new()
    };
    println!(
        "{:<width$} {:>7} {:>7} {:>8} {:>9}{extra}",
        "network", "nodes", "edges", "<k>", "r"
    );
    for (name, g, r, r_max, r_min) in &rows {
        let extra = if extremal {
            format!(" {:>8} {:>8}", fmt_r(*r_max), fmt_r(*r_min))
        } else {
            String::new()
        };
        println!(
            "{name:<width$} {:>7} {:>7} {:>8.3} {:>9}{extra}",
            g.node_count(),
            g.edge_count(),
            g.mean_degree(),
            fmt_r(*r)
        );
    }
    Ok(())
}

fn write_trace(path: &Path, res: &AttackResult) -> Result<()> {
    write_to(Some(path), |w| {
        writeln!(w, "step,dp,r")?;
        writeln!(w, "0,0,{}", res.initial_r)?;
        for s in &res.trace {
            writeln!(w, "{},{},{}", s.step, s.dp, s.r)?;
        }
        Ok(())
    })
}

#[allow(clippy::too_many_arguments)]
fn attack(
    mut lg: LabeledGraph,
    strategy: Strategy,
    budget: &Budget,
    opts: EnumerationOptions,
    seed: u64,
    output: Option<&Path>,
    trace: Option<&Path>,
    as_json: bool,
) -> Result<()> {
    let k = budget.pairs(&lg.graph)?;
    let started = Instant::now();
    let pool = strategy
        .uses_pool()
        .then(|| enumerate_candidates_with(&lg.graph, strategy.mode().sign(), opts));
    let (res, status) = run_strategy(
        &lg.graph,
        strategy,
        k,
        seed,
        pool.as_ref(),
        SolverLimits::default(),
    )?;
    for c in &res.selected {
        assort_core::rewiring::apply_rewiring(&mut lg.graph, c)?;
    }
    let wall_ms = started.elapsed().as_millis() as u64;
    if let Some(path) = output {
        assort_core::io::write_edge_list(&lg, path)?;
    }
    if let Some(path) = trace {
        write_trace(path, &res)?;
    }
    let summary = json!({
        "strategy": strategy.id(),
        "pairs_requested": k,
        "pairs": res.pairs(),
        "seed": seed,
        "r_initial": res.initial_r,
        "r_final": res.final_r,
        "dp": res.dp(),
        "wall_ms": wall_ms,
        "status": status,
    });
    if as_json {
        println!("{}", serde_json::to_string_pretty(&summary)?);
    } else {
        println!(
            "strategy={} pairs={}/{k} r_initial={:.6} r_final={:.6} dp={} wall_ms={wall_ms} status={status}",
            strategy.id(),
            res.pairs(),
            res.initial_r,
            res.final_r,
            res.dp(),
        );
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn exact(
    g: &Graph,
    budget: &Budget,
    mode: Mode,
    each: bool,
    limits: SolverLimits,
    brute_force: bool,
    opts: EnumerationOptions,
    as_json: bool,
) -> Result<()> {
    let k = budget.pairs(g)?;
    let sums = g.assortativity_sums()?;
    let pool = enumerate_candidates_with(g, mode.sign(), opts);
    let budgets: Vec<usize> = if each { (1..=k).collect() } else { vec![k] };
    let mut rows = Vec::new();
    for k in budgets {
        let started = Instant::now();
        let sol = solve_exact_with(&build_exact_problem_from_pool(&pool, k, mode), limits);
        let elapsed = started.elapsed();
        let greedy = greedy_attack_with_pool(&mut g.clone(), &pool, k)?;
        let brute = if brute_force {
            Some(brute_force_optimum(g, k, mode)?.objective)
        } else {
            None
        };
        if let Some(b) = brute {
            if b != sol.objective && sol.proven_optimal {
                bail!(
                    "exact objective {} disagrees with brute force {b} at k={k}",
                    sol.objective
                );
            }
        }
        rows.push(json!({
            "pairs": k,
            "exact_dp": sol.objective,
            "exact_r": sums.r_with_delta(sol.objective)?,
            "greedy_dp": greedy.dp(),
            "greedy_r": greedy.final_r,
            "proven_optimal": sol.proven_optimal,
            "nodes": sol.nodes_explored,
            "ms": elapsed.as_millis() as u64,
            "brute_force_dp": brute,
        }));
    }
    if as_json {
        println!("{}", serde_json::to_string_pretty(&rows)?);
        return Ok(());
    }
    println!(
        "{:>5} {:>9} {:>9} {:>9} {:>9} {:>7} {:>10} {:>8}",
        "pairs", "exact_dp", "exact_r", "gars_dp", "gars_r", "optimal", "nodes", "ms"
    );
    for r in &rows {
        let int = |key: &str| r[key].to_string();
        let real = |key: &str| {
            r[key]
                .as_f64()
                .map_or_else(|| "-".into(), |x| format!("{x:.4}"))
        };
        println!(
            "{:>5} {:>9} {:>9} {:>9} {:>9} {:>7} {:>10} {:>8}",
            int("pairs"),
            int("exact_dp"),
            real("exact_r"),
            int("greedy_dp"),
            real("greedy_r"),
            int("proven_optimal"),
            int("nodes"),
            int("ms"),
        );
    }
    Ok(())
}

fn sweep(
    inputs: &[PathBuf],
    models: &[Model],
    cfg: &SweepConfig,
    output: Option<&Path>,
    seed: u64,
    as_json: bool,
) -> Result<()> {
    let mut graphs: Vec<(String, Graph)> = Vec::new();
    for path in inputs {
        let name = path.file_stem().map_or_else(
            || path.display().to_string(),
            |s| s.to_string_lossy().into_owned(),
        );
        graphs.push((name, read_input(path)?.graph));
    }
    for &m in models {
        graphs.push((
            m.to_string().replace(':', "-"),
            generate(&GeneratorSpec::new(m, seed))?,
        ));
    }
    if graphs.is_empty() {
        bail!("no inputs: give edge-list files or --generate MODEL");
    }
    if graphs.len() > 1 && output.is_none() {
        bail!("several inputs need --output");
    }
    let mut summary = Vec::new();
    for (name, g) in &graphs {
        let rows = run_sweep(g, cfg).with_context(|| format!("sweeping {name}"))?;
        match output {
            Some(out) if graphs.len() > 1 => {
                let stem = out
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                let ext = out
                    .extension()
                    .map_or("csv".into(), |e| e.to_string_lossy().into_owned());
                let path = out.with_file_name(format!("{stem}-{name}.{ext}"));
                write_csv(&rows, &path)?;
                eprintln!("wrote {}", path.display());
            }
            Some(out) => write_csv(&rows, out)?,
            None if as_json => {}
            None => write_csv_to(&rows, io::stdout().lock())?,
        }
        for r in rows.iter().filter(|r| r.run == -1) {
            summary.push(json!({
                "network": name,
                "strategy": r.strategy,
                "fraction": r.fraction,
                "pairs": r.pairs,
                "r_initial": r.r_initial,
                "mean_r_final": r.r_final,
            }));
        }
    }
    if as_json {
        println!("{}", serde_json::to_string_pretty(&summary)?);
    }
    Ok(())
}
