//! Exact integer optimum for small instances, used as ground truth when
//! measuring approximation ratios and checking the hardness reduction.

use crate::instance::{PipInstance, CAP_TOL};
use crate::lp::solve_lp;
use crate::regimes::RegimeConfig;
use crate::rounding::round_and_alter;

/// Enumeration is capped at this many variables.
pub const MAX_ORACLE_VARS: usize = 30;

#[derive(Debug, Clone)]
pub struct ExactResult {
    pub value: f64,
    pub argmax: Vec<bool>,
    pub nodes_explored: u64,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum OracleError {
    #[error("instance has {n} variables; exact search is capped at {MAX_ORACLE_VARS}")]
    TooLarge { n: usize },
    #[error("node limit reached after exploring {explored} nodes")]
    NodeLimit { explored: u64 },
}

struct Search<'a> {
    inst: &'a PipInstance,
    /// DFS decision order: free items by descending objective coefficient.
    order: Vec<usize>,
    /// For each depth, the undecided suffix sorted by c/agg ratio.
    bound_lists: Vec<Vec<usize>>,
    agg: Vec<f64>,
    node_limit: u64,
    nodes: u64,
    best_value: f64,
    best_set: Vec<bool>,
}

impl<'a> Search<'a> {
    /// Fractional greedy optimum of the single aggregated constraint
    /// `sum_i A_i x <= residual`; a valid upper bound on any completion of
    /// the undecided items at `depth`.
    fn greedy_bound(&self, depth: usize, residual_agg: f64) -> f64 {
        let mut capacity = residual_agg;
        let mut bound = 0.0;
        for &j in &self.bound_lists[depth] {
            let weight = self.agg[j];
            let profit = self.inst.costs()[j];
            if weight <= capacity {
                capacity -= weight;
                bound += profit;
            } else {
                if capacity > 0.0 && weight > 0.0 {
                    bound += profit * capacity / weight;
                }
                break;
            }
        }
        bound
    }

    fn dfs(
        &mut self,
        depth: usize,
        value: f64,
        loads: &mut Vec<f64>,
        residual_agg: f64,
        chosen: &mut Vec<bool>,
    ) -> Result<(), OracleError> {
        self.nodes += 1;
        if self.nodes > self.node_limit {
            return Err(OracleError::NodeLimit {
                explored: self.nodes,
            });
        }
        if value > self.best_value {
            self.best_value = value;
            self.best_set = chosen.clone();
        }
        if depth == self.order.len() {
            return Ok(());
        }
        if value + self.greedy_bound(depth, residual_agg) <= self.best_value + 1e-12 {
            return Ok(());
        }
        let j = self.order[depth];

        let fits = self
            .inst
            .capacities()
            .iter()
            .enumerate()
            .all(|(i, &bi)| loads[i] + self.inst.entry(i, j) <= bi + CAP_TOL);
        if fits {
            for (i, load) in loads.iter_mut().enumerate() {
                *load += self.inst.entry(i, j);
            }
            chosen[j] = true;
            self.dfs(
                depth + 1,
                value + self.inst.costs()[j],
                loads,
                residual_agg - self.agg[j],
                chosen,
            )?;
            chosen[j] = false;
            for (i, load) in loads.iter_mut().enumerate() {
                *load -= self.inst.entry(i, j);
            }
        }
        self.dfs(depth + 1, value, loads, residual_agg, chosen)
    }
}

/// Globally optimal boolean solution by depth-first search with
/// fractional-bound pruning. Items with an all-zero column consume nothing
/// and are always included.
pub fn brute_force_opt(inst: &PipInstance, node_limit: u64) -> Result<ExactResult, OracleError> {
    let n = inst.num_vars();
    if n > MAX_ORACLE_VARS {
        return Err(OracleError::TooLarge { n });
    }
    let mut agg = vec![0.0f64; n];
    for row in inst.rows() {
        for &(j, v) in row {
            agg[j] += v;
        }
    }
    let zero_cols = inst.zero_columns();
    let forced: Vec<bool> = {
        let mut f = vec![false; n];
        for &j in &zero_cols {
            f[j] = true;
        }
        f
    };
    let base_value: f64 = zero_cols.iter().map(|&j| inst.costs()[j]).sum();

    let mut order: Vec<usize> = (0..n).filter(|&j| !forced[j]).collect();
    order.sort_by(|&a, &b| {
        inst.costs()[b]
            .partial_cmp(&inst.costs()[a])
            .expect("finite costs")
            .then(a.cmp(&b))
    });
    let bound_lists: Vec<Vec<usize>> = (0..=order.len())
        .map(|depth| {
            let mut list = order[depth..].to_vec();
            list.sort_by(|&a, &b| {
                let ra = inst.costs()[a] / agg[a].max(f64::MIN_POSITIVE);
                let rb = inst.costs()[b] / agg[b].max(f64::MIN_POSITIVE);
                rb.partial_cmp(&ra).expect("finite ratios").then(a.cmp(&b))
            });
            list
        })
        .collect();

    let mut search = Search {
        inst,
        order,
        bound_lists,
        agg: agg.clone(),
        node_limit,
        nodes: 0,
        best_value: base_value,
        best_set: forced.clone(),
    };
    let residual_agg: f64 = inst.capacities().iter().sum();
    let mut loads = vec![0.0; inst.num_constraints()];
    let mut chosen = forced;
    search.dfs(0, base_value, &mut loads, residual_agg, &mut chosen)?;

    Ok(ExactResult {
        value: search.best_value,
        argmax: search.best_set,
        nodes_explored: search.nodes,
    })
}

/// Monte-Carlo approximation quality of the rounding pipeline on an
/// oracle-solvable instance.
#[derive(Debug, Clone)]
pub struct ApproxRatio {
    pub mean_value: f64,
    pub std_error: f64,
    pub ip_opt: f64,
    pub lp_opt: f64,
    pub ratio_vs_ip: f64,
    pub ratio_vs_lp: f64,
}

/// Run `trials` cascaded round-and-alter trials and compare the mean
/// repaired value against both the exact integer optimum and the LP bound.
pub fn approx_ratio(
    inst: &PipInstance,
    cfg: &RegimeConfig,
    trials: u64,
    seed: u64,
) -> Result<ApproxRatio, crate::Error> {
    let exact = brute_force_opt(inst, 100_000_000)?;
    let norm = inst.clone().normalize()?;
    let dims = norm.num_vars() + norm.num_constraints();
    let frac = solve_lp(&norm, 200 * dims + 10_000)?;
    let result = round_and_alter(&norm, &frac, cfg, trials, seed)?;
    let mean_value = result.mean_value();
    Ok(ApproxRatio {
        mean_value,
        std_error: result.std_error(),
        ip_opt: exact.value,
        lp_opt: frac.objective,
        ratio_vs_ip: mean_value / exact.value.max(f64::MIN_POSITIVE),
        ratio_vs_lp: mean_value / frac.objective.max(f64::MIN_POSITIVE),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete_graph, mis_to_pip, random_instance};
    use crate::instance::PipInstance;

    const LIMIT: u64 = 10_000_000;

    fn enumerate_opt(inst: &PipInstance) -> f64 {
        let n = inst.num_vars();
        assert!(n <= 20);
        let mut best = f64::NEG_INFINITY;
        for mask in 0u32..(1 << n) {
            let x: Vec<bool> = (0..n).map(|j| mask >> j & 1 == 1).collect();
            if inst.is_feasible(&x) {
                best = best.max(inst.value_of(&x));
            }
        }
        best
    }

    #[test]
    fn all_zero_costs_give_zero() {
        let inst =
            PipInstance::from_dense(vec![0.0, 0.0], vec![vec![1.0, 0.5]], vec![1.0]).unwrap();
        let res = brute_force_opt(&inst, LIMIT).unwrap();
        assert_eq!(res.value, 0.0);
    }

    #[test]
    fn k3_reduction_optimum_is_one() {
        let res = brute_force_opt(&mis_to_pip(&complete_graph(3)), LIMIT).unwrap();
        assert_eq!(res.value, 1.0);
    }

    #[test]
    fn two_items_both_fit() {
        let inst =
            PipInstance::from_dense(vec![3.0, 4.0], vec![vec![1.0, 1.0]], vec![2.0]).unwrap();
        let res = brute_force_opt(&inst, LIMIT).unwrap();
        assert_eq!(res.value, 7.0);
        assert_eq!(res.argmax, vec![true, true]);
    }

    #[test]
    fn zero_column_item_always_taken() {
        let inst =
            PipInstance::from_dense(vec![2.0, 1.0], vec![vec![0.0, 1.0]], vec![1.0]).unwrap();
        let res = brute_force_opt(&inst, LIMIT).unwrap();
        assert_eq!(res.argmax, vec![true, true]);
        assert_eq!(res.value, 3.0);
    }

    #[test]
    fn too_large_is_rejected() {
        let inst = random_instance(31, 2, 2.0, 0.5, 0);
        assert_eq!(
            brute_force_opt(&inst, LIMIT).unwrap_err(),
            OracleError::TooLarge { n: 31 }
        );
    }

    #[test]
    fn node_limit_reported() {
        let inst = random_instance(20, 3, 4.0, 0.8, 1);
        assert!(matches!(
            brute_force_opt(&inst, 5),
            Err(OracleError::NodeLimit { .. })
        ));
    }

    #[test]
    fn matches_plain_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..30 {
            let n = rng.gen_range(1..=12);
            let m = rng.gen_range(1..=5);
            let w = [1.0, 1.5, 2.0, 4.0][rng.gen_range(0..4)];
            let inst = random_instance(n, m, w, 0.6, rng.gen());
            let pruned = brute_force_opt(&inst, LIMIT).unwrap();
            let plain = enumerate_opt(&inst);
            assert!(
                (pruned.value - plain).abs() <= 1e-9,
                "pruned {} vs enumerated {plain}",
                pruned.value
            );
            assert!(inst.is_feasible(&pruned.argmax));
            assert!((inst.value_of(&pruned.argmax) - pruned.value).abs() <= 1e-9);
        }
    }

    #[test]
    fn pruning_explores_fewer_nodes_than_full_tree() {
        let inst = random_instance(18, 4, 2.0, 0.7, 5);
        let res = brute_force_opt(&inst, LIMIT).unwrap();
        assert!(res.nodes_explored < (1u64 << 19));
    }

    #[test]
    fn approx_ratio_small_width_meets_guarantee() {
        let inst = crate::generators::knapsack_instance(
            16,
            1.5,
            crate::generators::KnapsackProfile::MixedBigSmall,
            12,
        );
        let norm = inst.clone().normalize().unwrap();
        let cfg = crate::regimes::RegimeConfig::small_width(0.5, norm.delta1()).unwrap();
        let r = approx_ratio(&inst, &cfg, 50_000, 6).unwrap();
        assert!(r.ratio_vs_lp >= cfg.alpha / 2.0 - 3.0 * r.std_error / r.lp_opt);
        assert!(r.ip_opt <= r.lp_opt + 1e-7);
    }

    #[test]
    fn approx_ratio_reports_consistent_fields() {
        let inst = random_instance(14, 6, 3.0, 0.5, 8);
        let norm = inst.clone().normalize().unwrap();
        let cfg = crate::regimes::select_regime(&norm, None).unwrap();
        let r = approx_ratio(&inst, &cfg, 2000, 17).unwrap();
        assert!(r.ip_opt <= r.lp_opt + 1e-7);
        assert!((r.ratio_vs_lp - r.mean_value / r.lp_opt).abs() < 1e-12);
        assert!(r.mean_value >= 0.0);
        // The guarantee the regime promises: mean at least (alpha/2) LP.
        assert!(r.mean_value >= cfg.alpha / 2.0 * r.lp_opt - 4.0 * r.std_error);
    }
}
