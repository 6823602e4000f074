//! `pips` command line: solve packing integer programs by randomized
//! rounding with alteration, generate test instances, run experiment
//! sweeps, and verify the analytical tail bounds.
//!
//! Exit codes: 0 success, 2 usage/parse/validation error, 3 refusal to
//! round a width-1 instance without `--force-heuristic` (that case is as
//! hard as maximum independent set).

use clap::{Args, Parser, Subcommand, ValueEnum};
use pips::generators::{
    complete_graph, knapsack_instance, mis_to_pip, path_graph, random_graph, random_instance,
    Graph, KnapsackProfile,
};
use pips::harness::{configure_regime, sweep, SweepSpec};
use pips::instance::PipInstance;
use pips::lp::{default_max_iters, solve_lp};
use pips::oracle::brute_force_opt;
use pips::regimes::{alpha_weak, RegimeError};
use pips::rounding::{
    round_and_alter_with_plan, AlterationPlan, RoundAndAlterResult, SortingAlteration,
};
use rand::RngCore;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

mod verify;

#[derive(Parser)]
#[command(
    name = "pips",
    version,
    about = "Packing integer programs via randomized rounding with alteration",
    max_term_width = 100
)]
struct Cli {
    /// Worker threads for trials and sweep cells (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Round an instance file and write the solution JSON.
    Solve(SolveArgs),
    /// Generate an instance file.
    Gen(GenArgs),
    /// Run a sweep spec and emit the CSV report.
    Experiment(ExperimentArgs),
    /// Check the tail bounds and inequalities on their verification grids.
    VerifyBounds(VerifyArgs),
    /// Exact integer optimum of a small instance.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RegimeFlag {
    Auto,
    Weak,
    Strong,
    Largew,
    Smallwidth,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance JSON file.
    #[arg(long)]
    input: PathBuf,
    /// Width regime; `auto` selects from the instance statistics.
    #[arg(long, value_enum, default_value_t = RegimeFlag::Auto)]
    regime: RegimeFlag,
    /// Accuracy target for the large-width regime (hint under `auto`).
    #[arg(long)]
    eps: Option<f64>,
    /// Number of rounding trials; the best repaired solution is kept.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Master seed; drawn from system entropy (and printed) when absent.
    #[arg(long)]
    seed: Option<u64>,
    /// Solution output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Round width-1 instances with the sorted repair anyway, without any
    /// approximation guarantee.
    #[arg(long)]
    force_heuristic: bool,
    /// Use the index-order repair instead of the sorted one (baseline for
    /// comparison; no rejection-probability guarantee).
    #[arg(long)]
    baseline_unsorted: bool,
    /// Append per-trial statistics CSV to this file.
    #[arg(long)]
    trial_csv: Option<PathBuf>,
    /// Dump the final LP basis to this file.
    #[arg(long)]
    dump_basis: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenKind {
    Random,
    Knapsack,
    Mis,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProfileFlag {
    Uniform,
    SmallItems,
    MixedBigSmall,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: GenKind,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Variables (random/knapsack kinds).
    #[arg(long)]
    n: Option<usize>,
    /// Constraints (random kind).
    #[arg(long)]
    m: Option<usize>,
    /// Capacity of every constraint.
    #[arg(long, default_value_t = 2.0)]
    width: f64,
    /// Fill probability of non-pinned entries (random kind).
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    /// Item size profile (knapsack kind).
    #[arg(long, value_enum, default_value_t = ProfileFlag::Uniform)]
    profile: ProfileFlag,
    /// Graph for the mis kind: `k N`, `path N`, `random N P`, or
    /// `file EDGELIST` (one `u v` pair per line, 0-based).
    #[arg(long, num_args = 1..=3, value_name = "SPEC")]
    graph: Option<Vec<String>>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Sweep spec JSON file.
    #[arg(long)]
    spec: PathBuf,
    /// Report CSV output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Suppress the timestamp header and wall-clock column so identical
    /// inputs produce byte-identical reports.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    seed: Option<u64>,
    /// Monte-Carlo samples per randomized tail comparison.
    #[arg(long, default_value_t = 3000)]
    samples: u64,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    input: PathBuf,
    /// Node budget for the branch-and-bound search.
    #[arg(long, default_value_t = 100_000_000)]
    limit: u64,
    /// Result output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Error carrying the process exit code.
enum CliError {
    Usage(String),
    Hardness(String),
    CheckFailed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Hardness(_) => 3,
            CliError::CheckFailed(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Hardness(m) | CliError::CheckFailed(m) => m,
        }
    }
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // Ignore failure: the pool may already be initialized in tests.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let result = match cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Gen(args) => run_gen(args),
        Command::Experiment(args) => run_experiment(args),
        Command::VerifyBounds(args) => verify::run(args.seed.unwrap_or(2024), args.samples),
        Command::Oracle(args) => run_oracle(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    match seed {
        Some(s) => s,
        None => {
            let s = rand::rngs::OsRng.next_u64();
            eprintln!("seed drawn from system entropy: {s}");
            s
        }
    }
}

fn write_output(path: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{content}");
            if !content.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn load_instance(path: &Path) -> Result<PipInstance, CliError> {
    let inst =
        PipInstance::from_json_file(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let violations = inst.validate();
    let hard: Vec<String> = violations
        .iter()
        .filter(|v| !v.is_warning())
        .map(|v| v.to_string())
        .collect();
    if !hard.is_empty() {
        return Err(usage(format!(
            "{}: instance invalid: {}",
            path.display(),
            hard.join("; ")
        )));
    }
    for warning in violations.iter().filter(|v| v.is_warning()) {
        eprintln!("warning: {warning}");
    }
    Ok(inst)
}

fn run_solve(args: SolveArgs) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed);
    let raw = load_instance(&args.input)?;
    let norm = raw.clone().normalize().map_err(usage)?;
    let frac = solve_lp(
        &norm,
        default_max_iters(norm.num_vars(), norm.num_constraints()),
    )
    .map_err(usage)?;
    if let Some(path) = &args.dump_basis {
        let mut text = String::from("var\tkind\tdual_or_x\n");
        for &var in &frac.basis {
            let n = norm.num_vars();
            if var < n {
                text.push_str(&format!("x{var}\tstructural\t{}\n", frac.x[var]));
            } else {
                text.push_str(&format!("s{}\tslack\t{}\n", var - n, frac.duals[var - n]));
            }
        }
        std::fs::write(path, text)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    }

    let choice = match args.regime {
        RegimeFlag::Auto => pips::harness::RegimeChoice::Auto,
        RegimeFlag::Weak => pips::harness::RegimeChoice::Weak,
        RegimeFlag::Strong => pips::harness::RegimeChoice::Strong,
        RegimeFlag::Largew => pips::harness::RegimeChoice::Largew,
        RegimeFlag::Smallwidth => pips::harness::RegimeChoice::Smallwidth,
    };
    let heuristic = |norm: &pips::NormalizedInstance| -> (String, f64, RoundAndAlterResult) {
        // No guarantee applies at width 1; use the sorted repair with the
        // weak scaling factor clamped into (0, 1].
        let alpha = alpha_weak(norm.delta1()).min(1.0);
        let plan = AlterationPlan::Sorted(SortingAlteration::new(norm));
        let result = round_and_alter_with_plan(norm, &frac, alpha, &plan, args.trials, seed);
        ("heuristic-weak".to_string(), alpha, result)
    };
    if norm.width() <= 1.0 && !args.force_heuristic {
        return Err(CliError::Hardness(format!(
            "{}; rerun with --force-heuristic to round it anyway, without any guarantee",
            RegimeError::WidthOne
        )));
    }
    let (regime_name, alpha, result): (String, f64, RoundAndAlterResult) = if norm.width() <= 1.0
    {
        heuristic(&norm)
    } else {
        match configure_regime(choice, args.eps, &norm) {
            Ok(cfg) => {
                let result = if args.baseline_unsorted {
                    if cfg.regime == pips::Regime::SmallWidth {
                        return Err(usage(
                            "--baseline-unsorted applies to the sorted repair only \
                             (width >= 2 regimes)",
                        ));
                    }
                    let plan =
                        AlterationPlan::Sorted(SortingAlteration::unsorted_baseline(&norm));
                    round_and_alter_with_plan(&norm, &frac, cfg.alpha, &plan, args.trials, seed)
                } else {
                    pips::rounding::round_and_alter(&norm, &frac, &cfg, args.trials, seed)
                        .map_err(usage)?
                };
                let name = if args.baseline_unsorted {
                    format!("{}-unsorted-baseline", cfg.regime.name())
                } else {
                    cfg.regime.name().to_string()
                };
                (name, cfg.alpha, result)
            }
            // Width 1 is handled above; any other regime error is usage.
            Err(e) => return Err(usage(e)),
        }
    };

    // Independent feasibility check against the raw file data.
    if !raw.is_feasible(&result.best.x_double_prime) {
        return Err(CliError::CheckFailed(
            "internal error: repaired solution infeasible for the input".into(),
        ));
    }

    eprintln!(
        "regime={regime_name} alpha={alpha} width={} delta1={} lpOpt={} trials={} seed={seed}",
        norm.width(),
        norm.delta1(),
        frac.objective,
        args.trials
    );

    if let Some(path) = &args.trial_csv {
        std::fs::write(path, result.stats_csv(seed))
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    }

    let x: Vec<u8> = result
        .best
        .x_double_prime
        .iter()
        .map(|&b| u8::from(b))
        .collect();
    let solution = serde_json::json!({
        "value": result.best.value,
        "x": x,
        "regime": regime_name,
        "alpha": alpha,
        "lpOpt": frac.objective,
        "trials": args.trials,
        "seed": seed,
    });
    write_output(
        &args.out,
        &serde_json::to_string_pretty(&solution).expect("serializable"),
    )
}

fn parse_graph(spec: &[String], seed: u64) -> Result<Graph, CliError> {
    let parse_n = |s: &String| -> Result<usize, CliError> {
        s.parse()
            .map_err(|_| usage(format!("bad vertex count '{s}'")))
    };
    match spec {
        [kind, n] if kind == "k" => Ok(complete_graph(parse_n(n)?)),
        [kind, n] if kind == "path" => Ok(path_graph(parse_n(n)?)),
        [kind, n, p] if kind == "random" => {
            let p: f64 = p
                .parse()
                .map_err(|_| usage(format!("bad probability '{p}'")))?;
            if !(0.0..=1.0).contains(&p) {
                return Err(usage("edge probability must lie in [0, 1]"));
            }
            Ok(random_graph(parse_n(n)?, p, seed))
        }
        [kind, path] if kind == "file" => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {path}: {e}")))?;
            let mut edges = Vec::new();
            let mut max_vertex = 0usize;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let mut it = line.split_whitespace();
                let (u, v) = (it.next(), it.next());
                match (u, v) {
                    (Some(u), Some(v)) => {
                        let u: usize = u
                            .parse()
                            .map_err(|_| usage(format!("{path}:{}: bad vertex", lineno + 1)))?;
                        let v: usize = v
                            .parse()
                            .map_err(|_| usage(format!("{path}:{}: bad vertex", lineno + 1)))?;
                        max_vertex = max_vertex.max(u).max(v);
                        edges.push((u, v));
                    }
                    _ => return Err(usage(format!("{path}:{}: expected 'u v' pair", lineno + 1))),
                }
            }
            Graph::new(max_vertex + 1, edges).map_err(usage)
        }
        _ => Err(usage(
            "expected --graph k N | path N | random N P | file EDGELIST",
        )),
    }
}

fn run_gen(args: GenArgs) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed);
    let (inst, meta) = match args.kind {
        GenKind::Random => {
            let n = args.n.ok_or_else(|| usage("--kind random requires --n"))?;
            let m = args.m.ok_or_else(|| usage("--kind random requires --m"))?;
            if n == 0 || m == 0 || args.width < 1.0 || args.density <= 0.0 || args.density > 1.0 {
                return Err(usage("need n, m >= 1, width >= 1 and density in (0, 1]"));
            }
            let inst = random_instance(n, m, args.width, args.density, seed);
            let meta = serde_json::json!({
                "generator": {"kind": "random", "n": n, "m": m, "width": args.width,
                               "density": args.density, "seed": seed},
            });
            (inst, meta)
        }
        GenKind::Knapsack => {
            let n = args
                .n
                .ok_or_else(|| usage("--kind knapsack requires --n"))?;
            let profile = match args.profile {
                ProfileFlag::Uniform => KnapsackProfile::Uniform,
                ProfileFlag::SmallItems => KnapsackProfile::SmallItems,
                ProfileFlag::MixedBigSmall => KnapsackProfile::MixedBigSmall,
            };
            if n == 0 || args.width < 1.0 {
                return Err(usage("need n >= 1 and width >= 1"));
            }
            if profile != KnapsackProfile::Uniform && !(args.width > 1.0 && args.width <= 2.0) {
                return Err(usage("small-item profiles require width in (1, 2]"));
            }
            let inst = knapsack_instance(n, args.width, profile, seed);
            let meta = serde_json::json!({
                "generator": {"kind": "knapsack", "n": n, "width": args.width,
                               "profile": format!("{profile:?}"), "seed": seed},
            });
            (inst, meta)
        }
        GenKind::Mis => {
            let spec = args
                .graph
                .as_deref()
                .ok_or_else(|| usage("--kind mis requires --graph"))?;
            let graph = parse_graph(spec, seed)?;
            let inst = mis_to_pip(&graph);
            let meta = serde_json::json!({
                "generator": {"kind": "mis", "graph": spec.join(" "),
                               "vertices": graph.num_vertices(),
                               "edges": graph.num_edges(), "seed": seed},
            });
            (inst, meta)
        }
    };
    write_output(&args.out, &inst.to_json(Some(meta)))
}

fn run_experiment(args: ExperimentArgs) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed);
    let text = std::fs::read_to_string(&args.spec)
        .map_err(|e| usage(format!("cannot read {}: {e}", args.spec.display())))?;
    let spec: SweepSpec =
        serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", args.spec.display())))?;
    eprintln!(
        "experiment: {} cells, seed={seed}, deterministic={}",
        spec.cells.len(),
        args.deterministic
    );
    let csv = sweep(&spec, seed, args.deterministic);
    write_output(&args.out, &csv)
}

fn run_oracle(args: OracleArgs) -> Result<(), CliError> {
    let inst = load_instance(&args.input)?;
    let exact = brute_force_opt(&inst, args.limit).map_err(usage)?;
    let argmax: Vec<u8> = exact.argmax.iter().map(|&b| u8::from(b)).collect();
    let out = serde_json::json!({
        "value": exact.value,
        "argmax": argmax,
        "nodesExplored": exact.nodes_explored,
    });
    write_output(
        &args.out,
        &serde_json::to_string_pretty(&out).expect("serializable"),
    )
}
