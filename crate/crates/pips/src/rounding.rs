//! Round-and-alter: scale the fractional optimum by `alpha`, round each
//! coordinate independently, then repair every constraint by discarding
//! items until it is satisfied.
//!
//! Two repair schemes are provided. For width at least 2 each constraint
//! sorts its items by coefficient and keeps the largest feasible prefix of
//! the rounded ones; the sorting is what makes the rejection probability of
//! an item proportional to its own coefficient. For width `1 + eps` the
//! items of a constraint are split into small (`A_ij <= eps/2`) and big
//! ones: the small items greedily pack a reserved capacity of `eps` in
//! sorted order, and exactly one rounded big item is kept in the remaining
//! unit of capacity.

use crate::instance::{NormalizedInstance, CAP_TOL};
use crate::lp::FractionalSolution;
use crate::regimes::{Regime, RegimeConfig, RegimeError};
use crate::rng::trial_rng;
use rand::Rng;
use rayon::prelude::*;

#[derive(Debug, thiserror::Error)]
pub enum RoundingError {
    #[error("eps = {eps} outside (0, 1]")]
    EpsOutOfRange { eps: f64 },
    #[error("small-width alteration needs width 1 + eps = {expected}, instance has {got}")]
    WidthMismatch { expected: f64, got: f64 },
    #[error(transparent)]
    Regime(#[from] RegimeError),
}

/// How repairs interact across constraints.
///
/// `Cascaded` is the real algorithm: once a constraint zeroes an item,
/// later constraints see the updated solution and cannot reject it again
/// (the first rejector is recorded). `Isolated` evaluates every constraint
/// against the pristine rounded vector so that measured rejection
/// frequencies target exactly the per-constraint conditional events of the
/// analysis; the final solution still zeroes the union of all rejections.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlterMode {
    Cascaded,
    Isolated,
}

/// Result of one rounding trial.
#[derive(Debug, Clone)]
pub struct RoundingOutcome {
    /// Independently rounded vector; may violate constraints.
    pub x_prime: Vec<bool>,
    /// Repaired vector; always feasible.
    pub x_double_prime: Vec<bool>,
    /// Objective value of the repaired vector.
    pub value: f64,
    /// `(constraint, item)` rejection events. Under `Cascaded` each item
    /// appears at most once (first rejector); under `Isolated` every
    /// constraint that would reject it is listed.
    pub rejections: Vec<(usize, usize)>,
    /// Master seed of the trial that produced `x_prime`; 0 when the caller
    /// supplied the rounded vector directly.
    pub seed: u64,
}

/// Round each coordinate to 1 independently with probability `alpha * x_j`,
/// consuming exactly one draw per coordinate in index order.
pub fn independent_round<R: Rng>(x: &[f64], alpha: f64, rng: &mut R) -> Vec<bool> {
    assert!(alpha > 0.0 && alpha <= 1.0, "alpha must be in (0, 1]");
    x.iter().map(|&xj| rng.gen::<f64>() < alpha * xj).collect()
}

/// Per-constraint item order for the prefix repair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ItemOrder {
    /// Ascending coefficient, ties by column index. Required by the
    /// analysis.
    SortedAscending,
    /// Original column order; the baseline scheme kept for comparison only.
    Unsorted,
}

/// Prefix repair plan for the width >= 2 (and large-width) regimes. Sorting
/// is done once so repeated trials pay only a linear scan per constraint.
pub struct SortingAlteration<'a> {
    inst: &'a NormalizedInstance,
    rows: Vec<Vec<(usize, f64)>>,
}

impl<'a> SortingAlteration<'a> {
    pub fn new(inst: &'a NormalizedInstance) -> SortingAlteration<'a> {
        Self::with_order(inst, ItemOrder::SortedAscending)
    }

    /// Baseline variant that packs items in index order without sorting.
    /// No rejection-probability guarantee is claimed for it.
    pub fn unsorted_baseline(inst: &'a NormalizedInstance) -> SortingAlteration<'a> {
        Self::with_order(inst, ItemOrder::Unsorted)
    }

    fn with_order(inst: &'a NormalizedInstance, order: ItemOrder) -> SortingAlteration<'a> {
        let rows: Vec<Vec<(usize, f64)>> = inst
            .base()
            .rows()
            .map(|row| {
                let mut entries: Vec<(usize, f64)> =
                    row.iter().copied().filter(|&(_, v)| v > 0.0).collect();
                if order == ItemOrder::SortedAscending {
                    entries.sort_by(|&(j1, v1), &(j2, v2)| {
                        v1.partial_cmp(&v2)
                            .expect("finite entries")
                            .then(j1.cmp(&j2))
                    });
                }
                entries
            })
            .collect();
        SortingAlteration { inst, rows }
    }

    /// Entries of constraint `i` in repair order.
    pub fn ordered_row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn alter(&self, x_prime: &[bool], mode: AlterMode) -> RoundingOutcome {
        let capacity = self.inst.width();
        let mut kept = x_prime.to_vec();
        let mut rejections = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            let mut load = 0.0;
            for &(j, a) in row {
                let active = match mode {
                    AlterMode::Cascaded => kept[j],
                    AlterMode::Isolated => x_prime[j],
                };
                if !active {
                    continue;
                }
                if load + a <= capacity + CAP_TOL {
                    load += a;
                } else {
                    // Entries ascend, so every later rounded item in this
                    // constraint overflows as well: this is the prefix rule.
                    // Cascading zeroes `kept` immediately, which is what
                    // keeps an item's first rejector its only one.
                    kept[j] = false;
                    rejections.push((i, j));
                }
            }
        }
        finish_outcome(self.inst, x_prime, kept, rejections)
    }
}

/// Small/big split repair plan for width `1 + eps`.
pub struct SmallWidthAlteration<'a> {
    inst: &'a NormalizedInstance,
    eps: f64,
    /// Per constraint: items with `A_ij <= eps/2`, ascending `(value, col)`.
    smalls: Vec<Vec<(usize, f64)>>,
    /// Per constraint: items with `A_ij > eps/2`, ascending `(value, col)`.
    bigs: Vec<Vec<(usize, f64)>>,
}

impl<'a> SmallWidthAlteration<'a> {
    pub fn new(
        inst: &'a NormalizedInstance,
        eps: f64,
    ) -> Result<SmallWidthAlteration<'a>, RoundingError> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(RoundingError::EpsOutOfRange { eps });
        }
        let expected = 1.0 + eps;
        if (inst.width() - expected).abs() > CAP_TOL {
            return Err(RoundingError::WidthMismatch {
                expected,
                got: inst.width(),
            });
        }
        let mut smalls = Vec::with_capacity(inst.num_constraints());
        let mut bigs = Vec::with_capacity(inst.num_constraints());
        for row in inst.base().rows() {
            let mut small: Vec<(usize, f64)> = row
                .iter()
                .copied()
                .filter(|&(_, v)| v > 0.0 && v <= eps / 2.0)
                .collect();
            let mut big: Vec<(usize, f64)> = row
                .iter()
                .copied()
                .filter(|&(_, v)| v > eps / 2.0)
                .collect();
            let by_value = |&(j1, v1): &(usize, f64), &(j2, v2): &(usize, f64)| {
                v1.partial_cmp(&v2)
                    .expect("finite entries")
                    .then(j1.cmp(&j2))
            };
            small.sort_by(by_value);
            big.sort_by(by_value);
            smalls.push(small);
            bigs.push(big);
        }
        Ok(SmallWidthAlteration {
            inst,
            eps,
            smalls,
            bigs,
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn small_row(&self, i: usize) -> &[(usize, f64)] {
        &self.smalls[i]
    }

    pub fn big_row(&self, i: usize) -> &[(usize, f64)] {
        &self.bigs[i]
    }

    pub fn alter(&self, x_prime: &[bool], mode: AlterMode) -> RoundingOutcome {
        let mut kept = x_prime.to_vec();
        let mut rejections = Vec::new();
        for i in 0..self.inst.num_constraints() {
            let active = |kept: &[bool], j: usize| match mode {
                AlterMode::Cascaded => kept[j],
                AlterMode::Isolated => x_prime[j],
            };
            // Small items: greedy prefix into the reserved capacity eps.
            let mut load = 0.0;
            for &(j, a) in &self.smalls[i] {
                if !active(&kept, j) {
                    continue;
                }
                if load + a <= self.eps + CAP_TOL {
                    load += a;
                } else {
                    kept[j] = false;
                    rejections.push((i, j));
                }
            }
            // Big items: keep the rounded one with the smallest
            // coefficient in the remaining unit of capacity.
            let mut first_big_kept = false;
            for &(j, _) in &self.bigs[i] {
                if !active(&kept, j) {
                    continue;
                }
                if first_big_kept {
                    kept[j] = false;
                    rejections.push((i, j));
                } else {
                    first_big_kept = true;
                }
            }
        }
        finish_outcome(self.inst, x_prime, kept, rejections)
    }
}

fn finish_outcome(
    inst: &NormalizedInstance,
    x_prime: &[bool],
    kept: Vec<bool>,
    rejections: Vec<(usize, usize)>,
) -> RoundingOutcome {
    let value = inst.base().value_of(&kept);
    RoundingOutcome {
        x_prime: x_prime.to_vec(),
        x_double_prime: kept,
        value,
        rejections,
        seed: 0,
    }
}

/// One-shot prefix repair of a rounded vector (width >= 2 regimes).
pub fn alter_by_sorting(
    inst: &NormalizedInstance,
    x_prime: &[bool],
    mode: AlterMode,
) -> RoundingOutcome {
    SortingAlteration::new(inst).alter(x_prime, mode)
}

/// One-shot small/big repair of a rounded vector (width `1 + eps`).
pub fn alter_small_width(
    inst: &NormalizedInstance,
    eps: f64,
    x_prime: &[bool],
    mode: AlterMode,
) -> Result<RoundingOutcome, RoundingError> {
    Ok(SmallWidthAlteration::new(inst, eps)?.alter(x_prime, mode))
}

/// The repair scheme a regime uses.
pub enum AlterationPlan<'a> {
    Sorted(SortingAlteration<'a>),
    SmallWidth(SmallWidthAlteration<'a>),
}

impl<'a> AlterationPlan<'a> {
    pub fn for_regime(
        inst: &'a NormalizedInstance,
        cfg: &RegimeConfig,
    ) -> Result<AlterationPlan<'a>, RoundingError> {
        cfg.check_width(inst)?;
        match cfg.regime {
            Regime::WeakW2 | Regime::StrongW2 | Regime::LargeW => {
                Ok(AlterationPlan::Sorted(SortingAlteration::new(inst)))
            }
            Regime::SmallWidth => Ok(AlterationPlan::SmallWidth(SmallWidthAlteration::new(
                inst,
                cfg.eps.expect("SmallWidth carries eps"),
            )?)),
        }
    }

    pub fn alter(&self, x_prime: &[bool], mode: AlterMode) -> RoundingOutcome {
        match self {
            AlterationPlan::Sorted(p) => p.alter(x_prime, mode),
            AlterationPlan::SmallWidth(p) => p.alter(x_prime, mode),
        }
    }
}

/// Per-trial record, streamable as a CSV row.
#[derive(Debug, Clone, Copy)]
pub struct TrialStats {
    pub trial: u64,
    pub value: f64,
    pub num_rounded: usize,
    pub num_rejected: usize,
    pub feasible: bool,
}

#[derive(Debug)]
pub struct RoundAndAlterResult {
    /// Outcome with the largest repaired value (earliest trial on ties).
    pub best: RoundingOutcome,
    /// One record per trial, in trial order.
    pub stats: Vec<TrialStats>,
}

impl RoundAndAlterResult {
    pub fn mean_value(&self) -> f64 {
        self.stats.iter().map(|s| s.value).sum::<f64>() / self.stats.len() as f64
    }

    /// Standard error of the mean value.
    pub fn std_error(&self) -> f64 {
        let n = self.stats.len() as f64;
        if n < 2.0 {
            return 0.0;
        }
        let mean = self.mean_value();
        let var = self
            .stats
            .iter()
            .map(|s| (s.value - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0);
        (var / n).sqrt()
    }

    /// CSV lines `trial,seed,value,numRounded,numRejected,feasible`.
    pub fn stats_csv(&self, seed: u64) -> String {
        let mut out = String::from("trial,seed,value,numRounded,numRejected,feasible\n");
        for s in &self.stats {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                s.trial,
                seed,
                s.value,
                s.num_rounded,
                s.num_rejected,
                u8::from(s.feasible)
            ));
        }
        out
    }
}

/// Run `trials` independent round-and-alter trials (cascaded repairs) and
/// keep the best repaired solution. Each trial draws from its own counter
/// substream of `seed`, so results do not depend on scheduling order.
pub fn round_and_alter(
    inst: &NormalizedInstance,
    frac: &FractionalSolution,
    cfg: &RegimeConfig,
    trials: u64,
    seed: u64,
) -> Result<RoundAndAlterResult, RoundingError> {
    let plan = AlterationPlan::for_regime(inst, cfg)?;
    Ok(round_and_alter_with_plan(
        inst, frac, cfg.alpha, &plan, trials, seed,
    ))
}

/// Same trial loop against a caller-built repair plan; used directly when
/// no regime guarantee applies (e.g. rounding a width-1 instance anyway).
pub fn round_and_alter_with_plan(
    inst: &NormalizedInstance,
    frac: &FractionalSolution,
    alpha: f64,
    plan: &AlterationPlan,
    trials: u64,
    seed: u64,
) -> RoundAndAlterResult {
    assert!(trials >= 1, "at least one trial required");

    let run_one = |trial: u64| -> (TrialStats, RoundingOutcome) {
        let mut rng = trial_rng(seed, trial);
        let x_prime = independent_round(&frac.x, alpha, &mut rng);
        let mut outcome = plan.alter(&x_prime, AlterMode::Cascaded);
        outcome.seed = seed;
        let stats = TrialStats {
            trial,
            value: outcome.value,
            num_rounded: outcome.x_prime.iter().filter(|&&b| b).count(),
            num_rejected: outcome.rejections.len(),
            feasible: inst.base().is_feasible(&outcome.x_double_prime),
        };
        (stats, outcome)
    };

    type Acc = (Vec<TrialStats>, Option<(u64, RoundingOutcome)>);
    let merge_best =
        |best: Option<(u64, RoundingOutcome)>, trial: u64, out: RoundingOutcome| match best {
            None => Some((trial, out)),
            Some((bt, bo)) => {
                if out.value > bo.value || (out.value == bo.value && trial < bt) {
                    Some((trial, out))
                } else {
                    Some((bt, bo))
                }
            }
        };
    let (mut stats, best) = (0..trials)
        .into_par_iter()
        .map(run_one)
        .fold(
            || (Vec::new(), None) as Acc,
            |(mut stats, best), (s, out)| {
                let trial = s.trial;
                stats.push(s);
                (stats, merge_best(best, trial, out))
            },
        )
        .reduce(
            || (Vec::new(), None),
            |(mut s1, b1), (mut s2, b2)| {
                s1.append(&mut s2);
                let merged = match (b1, b2) {
                    (None, b) | (b, None) => b,
                    (Some((t1, o1)), Some((t2, o2))) => merge_best(Some((t1, o1)), t2, o2),
                };
                (s1, merged)
            },
        );
    stats.sort_by_key(|s| s.trial);
    let (_, best) = best.expect("at least one trial ran");
    RoundAndAlterResult { best, stats }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::PipInstance;
    use crate::lp::solve_lp;
    use crate::regimes::select_regime;
    use proptest::prelude::*;

    fn knapsack_norm(sizes: Vec<f64>, capacity: f64) -> NormalizedInstance {
        let n = sizes.len();
        PipInstance::from_dense(vec![1.0; n], vec![sizes], vec![capacity])
            .unwrap()
            .normalize()
            .unwrap()
    }

    #[test]
    fn rounding_extremes() {
        let mut rng = trial_rng(1, 0);
        assert!(independent_round(&[0.0; 16], 0.5, &mut rng)
            .iter()
            .all(|&b| !b));
        assert!(independent_round(&[1.0; 16], 1.0, &mut rng)
            .iter()
            .all(|&b| b));
    }

    #[test]
    fn rounding_binomial_concentration() {
        // x_j = 0.5 with alpha = 0.5: 1000 Bernoulli(0.25) coordinates.
        let x = vec![0.5; 1000];
        let seeds = 300u64;
        let mut total = 0usize;
        for s in 0..seeds {
            let mut rng = trial_rng(42, s);
            total += independent_round(&x, 0.5, &mut rng)
                .iter()
                .filter(|&&b| b)
                .count();
        }
        let mean = total as f64 / seeds as f64;
        let sd = (1000.0 * 0.25 * 0.75f64).sqrt();
        assert!((mean - 250.0).abs() <= 3.0 * sd, "mean {mean}");
    }

    #[test]
    fn sorting_keeps_feasible_vector_untouched() {
        let inst = knapsack_norm(vec![1.0, 0.4, 0.3], 2.0);
        let x_prime = vec![true, true, true];
        let out = alter_by_sorting(&inst, &x_prime, AlterMode::Cascaded);
        assert_eq!(out.x_double_prime, x_prime);
        assert!(out.rejections.is_empty());
        assert_eq!(out.value, 3.0);
    }

    #[test]
    fn sorting_prefix_rule_drops_largest() {
        // Sorted order (0.8, 0.9, 1.0); prefix sums 0.8, 1.7, 2.7: the
        // coefficient-1.0 item falls outside the prefix.
        let inst = knapsack_norm(vec![1.0, 0.9, 0.8], 2.0);
        let out = alter_by_sorting(&inst, &[true, true, true], AlterMode::Cascaded);
        assert_eq!(out.x_double_prime, vec![false, true, true]);
        assert_eq!(out.rejections, vec![(0, 0)]);
    }

    #[test]
    fn sorting_boundary_is_inclusive() {
        let inst = knapsack_norm(vec![1.0, 1.0], 2.0);
        let out = alter_by_sorting(&inst, &[true, true], AlterMode::Cascaded);
        assert_eq!(out.x_double_prime, vec![true, true]);
        assert!(out.rejections.is_empty());
    }

    #[test]
    fn unrounded_items_do_not_block() {
        let inst = knapsack_norm(vec![0.2, 1.0, 0.9], 1.0);
        // Only the 0.9 item is rounded; the smaller unrounded entries are
        // scanned first but contribute nothing.
        let out = alter_by_sorting(&inst, &[false, false, true], AlterMode::Cascaded);
        assert_eq!(out.x_double_prime, vec![false, false, true]);
        assert!(out.rejections.is_empty());
    }

    #[test]
    fn small_width_keeps_feasible_smalls() {
        // eps = 0.5; smalls sum to 0.45 <= eps, no big rounded.
        let inst = knapsack_norm(vec![1.0, 0.25, 0.2], 1.5);
        let out = alter_small_width(&inst, 0.5, &[false, true, true], AlterMode::Cascaded).unwrap();
        assert_eq!(out.x_double_prime, vec![false, true, true]);
        assert!(out.rejections.is_empty());
    }

    #[test]
    fn small_width_keeps_exactly_one_big() {
        // Bigs 0.9 and 0.8 both rounded: the smaller one is kept.
        let inst = knapsack_norm(vec![1.0, 0.9, 0.8], 1.5);
        let out = alter_small_width(&inst, 0.5, &[false, true, true], AlterMode::Cascaded).unwrap();
        assert_eq!(out.x_double_prime, vec![false, false, true]);
        assert_eq!(out.rejections, vec![(0, 1)]);
    }

    #[test]
    fn small_width_prefix_on_smalls() {
        // eps = 0.5, smalls (0.25, 0.25, 0.25): prefix 0.25, 0.50 fits,
        // the third overflows eps.
        let inst = knapsack_norm(vec![1.0, 0.25, 0.25, 0.25], 1.5);
        let out =
            alter_small_width(&inst, 0.5, &[false, true, true, true], AlterMode::Cascaded).unwrap();
        assert_eq!(out.x_double_prime, vec![false, true, true, false]);
        assert_eq!(out.rejections, vec![(0, 3)]);
    }

    #[test]
    fn small_width_rejects_bad_eps_or_width() {
        let inst = knapsack_norm(vec![1.0, 0.25], 1.5);
        assert!(matches!(
            alter_small_width(&inst, 0.0, &[true, true], AlterMode::Cascaded),
            Err(RoundingError::EpsOutOfRange { .. })
        ));
        assert!(matches!(
            alter_small_width(&inst, 0.25, &[true, true], AlterMode::Cascaded),
            Err(RoundingError::WidthMismatch { .. })
        ));
    }

    #[test]
    fn cascaded_rejections_subset_of_isolated() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for case in 0..60 {
            let n = rng.gen_range(2..12);
            let m = rng.gen_range(1..6);
            let width = if case % 3 == 0 { 1.5 } else { 2.0 };
            let inst = crate::generators::random_instance(n, m, width, 0.6, rng.gen());
            let norm = inst.normalize().unwrap();
            let x_prime: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.6)).collect();
            let alter = |mode| {
                if width < 2.0 {
                    alter_small_width(&norm, width - 1.0, &x_prime, mode).unwrap()
                } else {
                    alter_by_sorting(&norm, &x_prime, mode)
                }
            };
            let cascaded = alter(AlterMode::Cascaded);
            let isolated = alter(AlterMode::Isolated);
            for pair in &cascaded.rejections {
                assert!(
                    isolated.rejections.contains(pair),
                    "cascaded rejection {pair:?} missing from isolated set"
                );
            }
            // Isolated repairs reject at least as much, so its final
            // vector is dominated by the cascaded one.
            for (iso, casc) in isolated.x_double_prime.iter().zip(&cascaded.x_double_prime) {
                assert!(!iso | casc, "isolated kept an item the cascade dropped");
            }
        }
    }

    #[test]
    fn round_and_alter_deterministic_and_best_tracked() {
        let inst = crate::generators::random_instance(20, 8, 3.0, 0.5, 13)
            .normalize()
            .unwrap();
        let frac = solve_lp(&inst, 10_000).unwrap();
        let cfg = select_regime(&inst, None).unwrap();
        let a = round_and_alter(&inst, &frac, &cfg, 100, 7).unwrap();
        let b = round_and_alter(&inst, &frac, &cfg, 100, 7).unwrap();
        assert_eq!(a.best.value, b.best.value);
        assert_eq!(a.best.x_double_prime, b.best.x_double_prime);
        assert_eq!(a.stats.len(), 100);
        for (s1, s2) in a.stats.iter().zip(&b.stats) {
            assert_eq!(s1.trial, s2.trial);
            assert_eq!(s1.value, s2.value);
        }
        let max_stat = a
            .stats
            .iter()
            .map(|s| s.value)
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(a.best.value, max_stat);
        assert!(a.stats.iter().all(|s| s.feasible));
    }

    #[test]
    fn mean_value_meets_weak_guarantee() {
        // Expected repaired value is at least (alpha_1 / 2) LP.
        let inst = crate::generators::random_instance(40, 15, 3.0, 0.35, 55)
            .normalize()
            .unwrap();
        let frac = solve_lp(&inst, 20_000).unwrap();
        let cfg = RegimeConfig::weak(inst.delta1());
        let res = round_and_alter(&inst, &frac, &cfg, 100_000, 19).unwrap();
        let target = cfg.alpha / 2.0 * frac.objective;
        assert!(
            res.mean_value() >= target - 3.0 * res.std_error(),
            "mean {} below {target}",
            res.mean_value()
        );
    }

    #[test]
    fn empty_rounding_is_valid_output() {
        // Alpha small enough that nothing rounds under this stream.
        let inst = knapsack_norm(vec![1.0, 0.5], 2.0);
        let frac = solve_lp(&inst, 1000).unwrap();
        let cfg = RegimeConfig::weak(1e9);
        let res = round_and_alter(&inst, &frac, &cfg, 1, 3).unwrap();
        assert_eq!(res.best.value, 0.0);
        assert!(inst.base().is_feasible(&res.best.x_double_prime));
    }

    proptest! {
        #[test]
        fn repaired_vector_always_feasible(
            seed in 0u64..500,
            n in 2usize..14,
            m in 1usize..6,
            width_pick in 0usize..3,
        ) {
            let width = [2.0, 4.0, 1.5][width_pick];
            let inst = crate::generators::random_instance(n, m, width, 0.7, seed);
            let norm = inst.clone().normalize().unwrap();
            let mut rng = trial_rng(seed, 99);
            let x_prime: Vec<bool> = (0..n).map(|_| rand::Rng::gen_bool(&mut rng, 0.7)).collect();
            for mode in [AlterMode::Cascaded, AlterMode::Isolated] {
                let outcomes = if width < 2.0 {
                    vec![alter_small_width(&norm, width - 1.0, &x_prime, mode).unwrap()]
                } else {
                    vec![
                        alter_by_sorting(&norm, &x_prime, mode),
                        SortingAlteration::unsorted_baseline(&norm).alter(&x_prime, mode),
                    ]
                };
                for out in outcomes {
                    prop_assert!(norm.base().is_feasible(&out.x_double_prime));
                    prop_assert!(inst.is_feasible(&out.x_double_prime));
                    // Monotone damage x'' <= x'.
                    for (kept, rounded) in out.x_double_prime.iter().zip(&x_prime) {
                        prop_assert!(!kept | rounded);
                    }
                    for &(i, j) in &out.rejections {
                        prop_assert!(x_prime[j]);
                        prop_assert!(!out.x_double_prime[j]);
                        prop_assert!(i < m);
                    }
                }
            }
        }

        #[test]
        fn sorted_prefix_is_maximum_cardinality(
            sizes in proptest::collection::vec(0.01f64..1.0, 1..=15),
            cap_scale in 1.0f64..3.0,
        ) {
            let mut sizes = sizes;
            sizes[0] = 1.0; // pin the width
            let capacity = cap_scale;
            let inst = knapsack_norm(sizes.clone(), capacity);
            let rounded = vec![true; sizes.len()];
            let out = alter_by_sorting(&inst, &rounded, AlterMode::Cascaded);
            let kept_count = out.x_double_prime.iter().filter(|&&b| b).count();

            let mut best = 0usize;
            for mask in 0u32..(1 << sizes.len()) {
                let total: f64 = (0..sizes.len())
                    .filter(|&j| mask >> j & 1 == 1)
                    .map(|j| inst.base().entry(0, j))
                    .sum();
                if total <= capacity + CAP_TOL {
                    best = best.max(mask.count_ones() as usize);
                }
            }
            prop_assert_eq!(kept_count, best);
        }
    }
}
