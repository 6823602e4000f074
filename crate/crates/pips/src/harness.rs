//! Experiment orchestration: conditional rejection-probability estimation
//! with Wilson intervals, and regime sweeps emitting CSV reports.

use crate::generators::{
    complete_graph, knapsack_instance, mis_to_pip, path_graph, random_graph, random_instance,
    KnapsackProfile,
};
use crate::instance::{NormalizedInstance, PipInstance, CAP_TOL};
use crate::lp::{default_max_iters, solve_lp};
use crate::oracle::brute_force_opt;
use crate::regimes::{select_regime, RegimeConfig, DEFAULT_EPS_HINT};
use crate::rng::{derive_seed, trial_rng};
use crate::rounding::{independent_round, round_and_alter, AlterationPlan, RoundingOutcome};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::Instant;

/// Two-sided 99% normal quantile used for Wilson intervals.
pub const WILSON_Z99: f64 = 2.575829303548901;

/// Wilson score interval half-width for `successes` out of `samples` at
/// confidence level `z`. Zero samples report the vacuous half-width 1.
pub fn wilson_half_width(successes: u64, samples: u64, z: f64) -> f64 {
    if samples == 0 {
        return 1.0;
    }
    let n = samples as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n)
}

/// How rejection events are measured.
///
/// `Isolated` evaluates each constraint against the pristine rounded vector
/// with the item under study forced to 1, so estimates target exactly the
/// conditional events `Pr[E_ij | X_j = 1]` of the analysis. `Cascaded`
/// observes the real algorithm and conditions on naturally rounded items.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimateMode {
    #[default]
    Isolated,
    Cascaded,
}

#[derive(Debug, Clone, Copy)]
pub struct PairStats {
    pub samples: u64,
    pub rejections: u64,
    pub estimate: f64,
    pub wilson_half_width: f64,
    /// Analytical bound for this pair: `A_ij/(2 Delta_1)` in the
    /// `Delta_1`-scaled regimes, `e eps A_ij / Delta_1` for the large-width
    /// regime.
    pub analytic_bound: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ItemStats {
    pub sum_estimate: f64,
    pub sum_bound: f64,
    /// Sum of per-pair half-widths; conservative aggregate slack.
    pub sum_half_width: f64,
}

#[derive(Debug)]
pub struct RejectionReport {
    pub mode: EstimateMode,
    pub trials: u64,
    /// Rejection budget of the regime's analysis.
    pub gamma: f64,
    pub per_pair: BTreeMap<(usize, usize), PairStats>,
    pub per_item: BTreeMap<usize, ItemStats>,
    pub warnings: Vec<String>,
}

impl RejectionReport {
    pub fn max_item_rejection_sum(&self) -> Option<f64> {
        self.per_item
            .values()
            .map(|s| s.sum_estimate)
            .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
    }
}

/// Flattened slot bookkeeping: one counter per positive matrix entry, in a
/// fixed scan order shared by every trial.
struct SlotMap {
    /// `(constraint, column, entry)` per slot.
    slots: Vec<(usize, usize, f64)>,
}

enum Scanner<'a> {
    /// Prefix repair: slot layout follows the sorted rows.
    Sorted {
        plan: &'a crate::rounding::SortingAlteration<'a>,
        capacity: f64,
        m: usize,
    },
    /// Small/big repair: small slots for all rows first, then big slots.
    Small {
        plan: &'a crate::rounding::SmallWidthAlteration<'a>,
        m: usize,
    },
}

impl<'a> Scanner<'a> {
    fn slot_map(&self) -> SlotMap {
        let mut slots = Vec::new();
        match self {
            Scanner::Sorted { plan, m, .. } => {
                for i in 0..*m {
                    for &(j, a) in plan.ordered_row(i) {
                        slots.push((i, j, a));
                    }
                }
            }
            Scanner::Small { plan, m } => {
                for i in 0..*m {
                    for &(j, a) in plan.small_row(i) {
                        slots.push((i, j, a));
                    }
                }
                for i in 0..*m {
                    for &(j, a) in plan.big_row(i) {
                        slots.push((i, j, a));
                    }
                }
            }
        }
        SlotMap { slots }
    }

    /// Count, for every slot, whether the item would be rejected by its
    /// constraint if it were forced to 1 while all other coordinates keep
    /// their rounded values. One linear pass per constraint: an item at a
    /// sorted position is kept exactly when the rounded load of the strictly
    /// earlier positions plus its own entry still fits.
    fn scan_forced(&self, x_prime: &[bool], counts: &mut [u64]) {
        match self {
            Scanner::Sorted { plan, capacity, m } => {
                let mut slot = 0usize;
                for i in 0..*m {
                    let mut load = 0.0;
                    for &(j, a) in plan.ordered_row(i) {
                        if load + a > capacity + CAP_TOL {
                            counts[slot] += 1;
                        }
                        if x_prime[j] {
                            load += a;
                        }
                        slot += 1;
                    }
                }
            }
            Scanner::Small { plan, m } => {
                let eps = plan.eps();
                let mut slot = 0usize;
                for i in 0..*m {
                    let mut load = 0.0;
                    for &(j, a) in plan.small_row(i) {
                        if load + a > eps + CAP_TOL {
                            counts[slot] += 1;
                        }
                        if x_prime[j] {
                            load += a;
                        }
                        slot += 1;
                    }
                }
                for i in 0..*m {
                    // A forced big item is kept iff no rounded big item
                    // precedes it in (value, index) order.
                    let mut seen_rounded_big = false;
                    for &(j, _) in plan.big_row(i) {
                        if seen_rounded_big {
                            counts[slot] += 1;
                        }
                        if x_prime[j] {
                            seen_rounded_big = true;
                        }
                        slot += 1;
                    }
                }
            }
        }
    }
}

/// Estimate the conditional rejection probability of every `(constraint,
/// item)` pair with a positive entry, over `trials` independent roundings.
pub fn estimate_rejections(
    inst: &NormalizedInstance,
    cfg: &RegimeConfig,
    trials: u64,
    mode: EstimateMode,
    seed: u64,
) -> Result<RejectionReport, crate::Error> {
    assert!(trials >= 1);
    let frac = solve_lp(
        inst,
        default_max_iters(inst.num_vars(), inst.num_constraints()),
    )?;
    let plan = AlterationPlan::for_regime(inst, cfg)?;
    let delta1 = inst.delta1();
    let n = inst.num_vars();

    let mut warnings = Vec::new();
    match mode {
        EstimateMode::Isolated => {
            if trials < 100 {
                warnings.push(format!(
                    "only {trials} conditioned samples per pair; want at least 100"
                ));
            }
        }
        EstimateMode::Cascaded => {
            let min_expected = frac
                .x
                .iter()
                .filter(|&&xj| xj > 0.0)
                .map(|&xj| trials as f64 * cfg.alpha * xj)
                .fold(f64::INFINITY, f64::min);
            if min_expected < 100.0 {
                warnings.push(format!(
                    "minimum expected conditioned samples {min_expected:.1} below 100; \
                     increase trials"
                ));
            }
            if frac.x.contains(&0.0) {
                warnings.push(
                    "items with x_j = 0 are never rounded; their pairs collect no samples"
                        .to_string(),
                );
            }
        }
    }

    let (pair_counts, item_samples, slot_map) = match (&plan, mode) {
        (_, EstimateMode::Isolated) => {
            let scanner = match &plan {
                AlterationPlan::Sorted(p) => Scanner::Sorted {
                    plan: p,
                    capacity: inst.width(),
                    m: inst.num_constraints(),
                },
                AlterationPlan::SmallWidth(p) => Scanner::Small {
                    plan: p,
                    m: inst.num_constraints(),
                },
            };
            let slot_map = scanner.slot_map();
            let num_slots = slot_map.slots.len();
            let counts = (0..trials)
                .into_par_iter()
                .fold(
                    || vec![0u64; num_slots],
                    |mut counts, trial| {
                        let mut rng = trial_rng(seed, trial);
                        let x_prime = independent_round(&frac.x, cfg.alpha, &mut rng);
                        scanner.scan_forced(&x_prime, &mut counts);
                        counts
                    },
                )
                .reduce(
                    || vec![0u64; num_slots],
                    |mut a, b| {
                        for (x, y) in a.iter_mut().zip(b) {
                            *x += y;
                        }
                        a
                    },
                );
            (counts, vec![trials; n], slot_map)
        }
        (plan, EstimateMode::Cascaded) => {
            // Slot order: canonical row storage.
            let mut slots = Vec::new();
            let mut slot_of = BTreeMap::new();
            for (i, row) in inst.base().rows().enumerate() {
                for &(j, a) in row {
                    if a > 0.0 {
                        slot_of.insert((i, j), slots.len());
                        slots.push((i, j, a));
                    }
                }
            }
            let num_slots = slots.len();
            let (counts, samples) = (0..trials)
                .into_par_iter()
                .fold(
                    || (vec![0u64; num_slots], vec![0u64; n]),
                    |(mut counts, mut samples), trial| {
                        let mut rng = trial_rng(seed, trial);
                        let x_prime = independent_round(&frac.x, cfg.alpha, &mut rng);
                        let outcome: RoundingOutcome =
                            plan.alter(&x_prime, crate::rounding::AlterMode::Cascaded);
                        for (j, &rounded) in x_prime.iter().enumerate() {
                            if rounded {
                                samples[j] += 1;
                            }
                        }
                        for &(i, j) in &outcome.rejections {
                            counts[slot_of[&(i, j)]] += 1;
                        }
                        (counts, samples)
                    },
                )
                .reduce(
                    || (vec![0u64; num_slots], vec![0u64; n]),
                    |(mut c1, mut s1), (c2, s2)| {
                        for (x, y) in c1.iter_mut().zip(c2) {
                            *x += y;
                        }
                        for (x, y) in s1.iter_mut().zip(s2) {
                            *x += y;
                        }
                        (c1, s1)
                    },
                );
            (counts, samples, SlotMap { slots })
        }
    };

    let mut per_pair = BTreeMap::new();
    let mut per_item: BTreeMap<usize, ItemStats> = BTreeMap::new();
    for (slot, &(i, j, a)) in slot_map.slots.iter().enumerate() {
        let samples = item_samples[j];
        let rejections = pair_counts[slot];
        let estimate = if samples > 0 {
            rejections as f64 / samples as f64
        } else {
            0.0
        };
        let half_width = wilson_half_width(rejections, samples, WILSON_Z99);
        let bound = cfg.rejection_bound(a, delta1);
        per_pair.insert(
            (i, j),
            PairStats {
                samples,
                rejections,
                estimate,
                wilson_half_width: half_width,
                analytic_bound: bound,
            },
        );
        let item = per_item.entry(j).or_default();
        item.sum_estimate += estimate;
        item.sum_bound += bound;
        item.sum_half_width += half_width;
    }

    Ok(RejectionReport {
        mode,
        trials,
        gamma: cfg.gamma,
        per_pair,
        per_item,
        warnings,
    })
}

/// Instance source for one sweep cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum GeneratorSpec {
    Random {
        n: usize,
        m: usize,
        width: f64,
        density: f64,
        #[serde(default)]
        seed: Option<u64>,
    },
    Knapsack {
        n: usize,
        width: f64,
        profile: KnapsackProfile,
        #[serde(default)]
        seed: Option<u64>,
    },
    MisComplete {
        n: usize,
    },
    MisPath {
        n: usize,
    },
    MisRandom {
        n: usize,
        p: f64,
        #[serde(default)]
        seed: Option<u64>,
    },
    File {
        path: String,
    },
}

impl GeneratorSpec {
    pub fn build(&self, fallback_seed: u64) -> Result<PipInstance, crate::Error> {
        let inst = match self {
            GeneratorSpec::Random {
                n,
                m,
                width,
                density,
                seed,
            } => random_instance(*n, *m, *width, *density, seed.unwrap_or(fallback_seed)),
            GeneratorSpec::Knapsack {
                n,
                width,
                profile,
                seed,
            } => knapsack_instance(*n, *width, *profile, seed.unwrap_or(fallback_seed)),
            GeneratorSpec::MisComplete { n } => mis_to_pip(&complete_graph(*n)),
            GeneratorSpec::MisPath { n } => mis_to_pip(&path_graph(*n)),
            GeneratorSpec::MisRandom { n, p, seed } => {
                mis_to_pip(&random_graph(*n, *p, seed.unwrap_or(fallback_seed)))
            }
            GeneratorSpec::File { path } => {
                PipInstance::from_json_file(std::path::Path::new(path))?
            }
        };
        Ok(inst)
    }

    pub fn label(&self) -> String {
        match self {
            GeneratorSpec::Random {
                n,
                m,
                width,
                density,
                ..
            } => {
                format!("random(n={n} m={m} w={width} d={density})")
            }
            GeneratorSpec::Knapsack {
                n, width, profile, ..
            } => {
                format!("knapsack(n={n} w={width} {profile:?})")
            }
            GeneratorSpec::MisComplete { n } => format!("mis-complete({n})"),
            GeneratorSpec::MisPath { n } => format!("mis-path({n})"),
            GeneratorSpec::MisRandom { n, p, .. } => format!("mis-random({n},{p})"),
            GeneratorSpec::File { path } => format!("file({path})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegimeChoice {
    #[default]
    Auto,
    Weak,
    Strong,
    Largew,
    Smallwidth,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepCell {
    #[serde(default)]
    pub name: Option<String>,
    pub generator: GeneratorSpec,
    #[serde(default)]
    pub regime: RegimeChoice,
    /// Accuracy target for `largew` / hint for `auto`.
    #[serde(default)]
    pub eps: Option<f64>,
    pub trials: u64,
    /// Mode for the rejection-rate columns; values always come from
    /// cascaded trials.
    #[serde(default)]
    pub mode: EstimateMode,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    pub cells: Vec<SweepCell>,
}

/// Resolve the per-cell regime choice against an instance.
pub fn configure_regime(
    choice: RegimeChoice,
    eps: Option<f64>,
    inst: &NormalizedInstance,
) -> Result<RegimeConfig, crate::Error> {
    let cfg = match choice {
        RegimeChoice::Auto => select_regime(inst, eps)?,
        RegimeChoice::Weak => RegimeConfig::weak(inst.delta1()),
        RegimeChoice::Strong => RegimeConfig::strong(inst.delta1(), inst.width()),
        RegimeChoice::Largew => RegimeConfig::large_w(eps.unwrap_or(DEFAULT_EPS_HINT))?,
        RegimeChoice::Smallwidth => RegimeConfig::small_width(inst.width() - 1.0, inst.delta1())?,
    };
    cfg.check_width(inst).map_err(crate::Error::from)?;
    Ok(cfg)
}

struct CellRow {
    cell: usize,
    name: String,
    generator: String,
    n: Option<usize>,
    m: Option<usize>,
    width: Option<f64>,
    delta0: Option<usize>,
    delta1: Option<f64>,
    regime: Option<&'static str>,
    alpha: Option<f64>,
    trials: u64,
    lp_opt: Option<f64>,
    ip_opt: Option<f64>,
    mean_value: Option<f64>,
    std_error: Option<f64>,
    ratio_vs_lp: Option<f64>,
    ratio_vs_ip: Option<f64>,
    max_item_rejection_sum: Option<f64>,
    wall_clock_s: Option<f64>,
    error: Option<String>,
}

pub const SWEEP_CSV_HEADER: &str = "cell,name,generator,n,m,width,delta0,delta1,regime,alpha,\
 trials,lp_opt,ip_opt,mean_value,std_error,ratio_vs_lp,ratio_vs_ip,\
 max_item_rejection_sum,wall_clock_s,error";

fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

impl CellRow {
    fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.cell,
            self.name,
            self.generator,
            opt(&self.n),
            opt(&self.m),
            opt(&self.width),
            opt(&self.delta0),
            opt(&self.delta1),
            opt(&self.regime),
            opt(&self.alpha),
            self.trials,
            opt(&self.lp_opt),
            opt(&self.ip_opt),
            opt(&self.mean_value),
            opt(&self.std_error),
            opt(&self.ratio_vs_lp),
            opt(&self.ratio_vs_ip),
            opt(&self.max_item_rejection_sum),
            opt(&self.wall_clock_s),
            opt(&self.error),
        )
    }
}

/// Node budget for the optional exact column in sweep rows.
const SWEEP_ORACLE_NODES: u64 = 20_000_000;

fn run_cell(index: usize, cell: &SweepCell, master_seed: u64, deterministic: bool) -> CellRow {
    let started = Instant::now();
    let mut row = CellRow {
        cell: index,
        name: cell.name.clone().unwrap_or_default(),
        generator: cell.generator.label(),
        n: None,
        m: None,
        width: None,
        delta0: None,
        delta1: None,
        regime: None,
        alpha: None,
        trials: cell.trials,
        lp_opt: None,
        ip_opt: None,
        mean_value: None,
        std_error: None,
        ratio_vs_lp: None,
        ratio_vs_ip: None,
        max_item_rejection_sum: None,
        wall_clock_s: None,
        error: None,
    };
    let gen_seed = derive_seed(master_seed, 2 * index as u64);
    let round_seed = derive_seed(master_seed, 2 * index as u64 + 1);

    let outcome = (|| -> Result<(), crate::Error> {
        let inst = cell.generator.build(gen_seed)?;
        row.n = Some(inst.num_vars());
        row.m = Some(inst.num_constraints());
        let norm = inst.clone().normalize()?;
        row.width = Some(norm.width());
        row.delta0 = Some(norm.delta0());
        row.delta1 = Some(norm.delta1());

        let frac = solve_lp(
            &norm,
            default_max_iters(norm.num_vars(), norm.num_constraints()),
        )?;
        row.lp_opt = Some(frac.objective);
        if inst.num_vars() <= crate::oracle::MAX_ORACLE_VARS {
            if let Ok(exact) = brute_force_opt(&inst, SWEEP_ORACLE_NODES) {
                row.ip_opt = Some(exact.value);
            }
        }

        let cfg = configure_regime(cell.regime, cell.eps, &norm)?;
        row.regime = Some(cfg.regime.name());
        row.alpha = Some(cfg.alpha);

        let result = round_and_alter(&norm, &frac, &cfg, cell.trials, round_seed)?;
        let mean = result.mean_value();
        row.mean_value = Some(mean);
        row.std_error = Some(result.std_error());
        if frac.objective > 0.0 {
            row.ratio_vs_lp = Some(mean / frac.objective);
        }
        if let Some(ip) = row.ip_opt {
            if ip > 0.0 {
                row.ratio_vs_ip = Some(mean / ip);
            }
        }

        let report = estimate_rejections(
            &norm,
            &cfg,
            cell.trials,
            cell.mode,
            derive_seed(round_seed, 1),
        )?;
        row.max_item_rejection_sum = report.max_item_rejection_sum();
        Ok(())
    })();
    if let Err(e) = outcome {
        row.error = Some(e.to_string().replace(',', ";"));
    }
    if !deterministic {
        row.wall_clock_s = Some(started.elapsed().as_secs_f64());
    }
    row
}

/// Run every cell of the spec (in a work pool) and assemble the CSV report.
/// With `deterministic` set, the timestamp header and wall-clock column are
/// suppressed so identical inputs produce identical bytes.
pub fn sweep(spec: &SweepSpec, seed: u64, deterministic: bool) -> String {
    let rows: Vec<CellRow> = spec
        .cells
        .par_iter()
        .enumerate()
        .map(|(i, cell)| run_cell(i, cell, seed, deterministic))
        .collect();
    let mut out = String::new();
    out.push_str("# pips experiment report\n");
    out.push_str(&format!(
        "# seed={} cells={} deterministic={}\n",
        seed,
        spec.cells.len(),
        deterministic
    ));
    if !deterministic {
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        out.push_str(&format!("# timestamp={now}\n"));
    }
    out.push_str(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv());
        out.push('\n');
    }
    out
}
