//! Bounded-variable primal simplex for the natural LP relaxation
//! `max { c·x : Ax <= b, 0 <= x <= 1 }`.
//!
//! The variable bounds are handled implicitly (nonbasic variables may rest at
//! either bound) rather than as doubled constraints, so the basis stays m x m.
//! Slack variables make the initial all-slack basis feasible because every
//! capacity is strictly positive. Pricing is Dantzig (most positive rate of
//! improvement) and falls back to Bland's rule after `10 * (n + m)` iterations
//! to guarantee termination; ratio-test ties break towards the smallest
//! variable index so that solves are bit-for-bit reproducible.

use crate::instance::NormalizedInstance;

/// Eligibility and ratio-test pivot tolerance.
const PIVOT_TOL: f64 = 1e-10;
/// LU pivots below this magnitude mean the basis is numerically singular.
const SINGULAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    IterationLimit,
}

/// Optimal basic feasible solution of the relaxation.
#[derive(Debug, Clone)]
pub struct FractionalSolution {
    /// Primal values, componentwise in `[0, 1]`.
    pub x: Vec<f64>,
    /// Objective value `c·x`.
    pub objective: f64,
    pub status: LpStatus,
    /// Row duals `y` extracted from the final basis (`B^T y = c_B`).
    pub duals: Vec<f64>,
    /// Variable indices in the final basis; `n..n+m` are row slacks.
    pub basis: Vec<usize>,
    pub iterations: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum LpError {
    #[error("simplex did not converge within {iterations} iterations")]
    IterationLimit { iterations: usize },
    #[error("basis became numerically singular at iteration {iteration}")]
    SingularBasis { iteration: usize },
    #[error("internal error: unbounded direction in a bounded LP")]
    UnboundedDirection,
}

impl FractionalSolution {
    /// Objective of the dual solution implied by the final basis:
    /// `b·y + sum_j max(0, c_j - y·A_j)`. Strong duality makes this match
    /// the primal objective at optimality.
    pub fn dual_objective(&self, inst: &NormalizedInstance) -> f64 {
        let base = inst.base();
        let mut obj: f64 = base
            .capacities()
            .iter()
            .zip(&self.duals)
            .map(|(&bi, &yi)| bi * yi)
            .sum();
        let mut reduced: Vec<f64> = base.costs().to_vec();
        for (i, row) in base.rows().enumerate() {
            for &(j, v) in row {
                reduced[j] -= self.duals[i] * v;
            }
        }
        obj += reduced.iter().map(|&d| d.max(0.0)).sum::<f64>();
        obj
    }
}

/// Dense LU with partial pivoting; solves both `Bx = r` and `B^T x = r`
/// from one factorization.
struct LuFactors {
    dim: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl LuFactors {
    fn factor(mut a: Vec<f64>, dim: usize) -> Option<LuFactors> {
        let mut perm: Vec<usize> = (0..dim).collect();
        for k in 0..dim {
            let mut pivot_row = k;
            let mut pivot_val = a[k * dim + k].abs();
            for i in k + 1..dim {
                let v = a[i * dim + k].abs();
                if v > pivot_val {
                    pivot_val = v;
                    pivot_row = i;
                }
            }
            if pivot_val < SINGULAR_TOL {
                return None;
            }
            if pivot_row != k {
                for j in 0..dim {
                    a.swap(k * dim + j, pivot_row * dim + j);
                }
                perm.swap(k, pivot_row);
            }
            let pivot = a[k * dim + k];
            for i in k + 1..dim {
                let factor = a[i * dim + k] / pivot;
                a[i * dim + k] = factor;
                for j in k + 1..dim {
                    a[i * dim + j] -= factor * a[k * dim + j];
                }
            }
        }
        Some(LuFactors { dim, lu: a, perm })
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 1..n {
            let mut acc = x[i];
            for (k, &xk) in x.iter().enumerate().take(i) {
                acc -= self.lu[i * n + k] * xk;
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for (k, &xk) in x.iter().enumerate().take(n).skip(i + 1) {
                acc -= self.lu[i * n + k] * xk;
            }
            x[i] = acc / self.lu[i * n + i];
        }
        x
    }

    fn solve_transpose(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.dim;
        // B^T x = r with PB = LU: solve U^T z = r, then L^T v = z, then
        // scatter through the permutation.
        let mut z = rhs.to_vec();
        for i in 0..n {
            let mut acc = z[i];
            for (k, &zk) in z.iter().enumerate().take(i) {
                acc -= self.lu[k * n + i] * zk;
            }
            z[i] = acc / self.lu[i * n + i];
        }
        for i in (0..n).rev() {
            let mut acc = z[i];
            for (k, &zk) in z.iter().enumerate().take(n).skip(i + 1) {
                acc -= self.lu[k * n + i] * zk;
            }
            z[i] = acc;
        }
        let mut x = vec![0.0; n];
        for i in 0..n {
            x[self.perm[i]] = z[i];
        }
        x
    }
}

struct Simplex<'a> {
    n: usize,
    m: usize,
    costs: &'a [f64],
    capacities: &'a [f64],
    /// Column-major copy of A: `columns[j]` lists `(row, value)`.
    columns: Vec<Vec<(usize, f64)>>,
    /// Variable indices in the basis, one per row.
    basis: Vec<usize>,
    /// Basis position of each variable, or `usize::MAX` if nonbasic.
    basis_pos: Vec<usize>,
    /// Nonbasic variables resting at their upper bound (structural only).
    at_upper: Vec<bool>,
}

impl<'a> Simplex<'a> {
    fn new(inst: &'a NormalizedInstance) -> Simplex<'a> {
        let base = inst.base();
        let n = base.num_vars();
        let m = base.num_constraints();
        let mut columns = vec![Vec::new(); n];
        for (i, row) in base.rows().enumerate() {
            for &(j, v) in row {
                columns[j].push((i, v));
            }
        }
        let basis: Vec<usize> = (n..n + m).collect();
        let mut basis_pos = vec![usize::MAX; n + m];
        for (k, &var) in basis.iter().enumerate() {
            basis_pos[var] = k;
        }
        Simplex {
            n,
            m,
            costs: base.costs(),
            capacities: base.capacities(),
            columns,
            basis,
            basis_pos,
            at_upper: vec![false; n + m],
        }
    }

    fn cost_of(&self, var: usize) -> f64 {
        if var < self.n {
            self.costs[var]
        } else {
            0.0
        }
    }

    fn upper_bound(&self, var: usize) -> f64 {
        if var < self.n {
            1.0
        } else {
            f64::INFINITY
        }
    }

    /// Accumulate `scale * column(var)` into a dense work vector.
    fn add_column(&self, var: usize, scale: f64, out: &mut [f64]) {
        if var < self.n {
            for &(i, v) in &self.columns[var] {
                out[i] += scale * v;
            }
        } else {
            out[var - self.n] += scale;
        }
    }

    fn dot_column(&self, var: usize, y: &[f64]) -> f64 {
        if var < self.n {
            self.columns[var].iter().map(|&(i, v)| y[i] * v).sum()
        } else {
            y[var - self.n]
        }
    }

    fn basis_matrix(&self) -> Vec<f64> {
        let m = self.m;
        let mut mat = vec![0.0; m * m];
        for (k, &var) in self.basis.iter().enumerate() {
            if var < self.n {
                for &(i, v) in &self.columns[var] {
                    mat[i * m + k] = v;
                }
            } else {
                mat[(var - self.n) * m + k] = 1.0;
            }
        }
        mat
    }

    fn run(&mut self, max_iters: usize) -> Result<(Vec<f64>, usize), LpError> {
        let bland_after = 10 * (self.n + self.m);
        let mut iterations = 0usize;
        loop {
            let lu =
                LuFactors::factor(self.basis_matrix(), self.m).ok_or(LpError::SingularBasis {
                    iteration: iterations,
                })?;

            // Basic values for the current bound assignment.
            let mut rhs = self.capacities.to_vec();
            for var in 0..self.n + self.m {
                if self.basis_pos[var] == usize::MAX && self.at_upper[var] {
                    self.add_column(var, -1.0, &mut rhs);
                }
            }
            let x_basic = lu.solve(&rhs);

            // Duals and entering candidate.
            let c_basic: Vec<f64> = self.basis.iter().map(|&v| self.cost_of(v)).collect();
            let y = lu.solve_transpose(&c_basic);
            let use_bland = iterations >= bland_after;
            let mut entering: Option<(usize, f64, f64)> = None; // (var, |d|, sigma)
            for var in 0..self.n + self.m {
                if self.basis_pos[var] != usize::MAX {
                    continue;
                }
                let d = self.cost_of(var) - self.dot_column(var, &y);
                let sigma = if self.at_upper[var] { -1.0 } else { 1.0 };
                let eligible = if sigma > 0.0 {
                    d > PIVOT_TOL
                } else {
                    d < -PIVOT_TOL
                };
                if !eligible {
                    continue;
                }
                if use_bland {
                    entering = Some((var, d.abs(), sigma));
                    break;
                }
                if entering.is_none_or(|(_, best, _)| d.abs() > best) {
                    entering = Some((var, d.abs(), sigma));
                }
            }
            let Some((q, _, sigma)) = entering else {
                return Ok((x_basic, iterations));
            };

            if iterations >= max_iters {
                return Err(LpError::IterationLimit { iterations });
            }
            iterations += 1;

            // Direction of basic change: x_B(t) = x_B - sigma * t * w.
            let mut col_q = vec![0.0; self.m];
            self.add_column(q, 1.0, &mut col_q);
            let w = lu.solve(&col_q);

            // Ratio test: smallest step that drives a basic variable to a
            // bound, against flipping the entering variable to its other
            // bound. Ties prefer the basic leave with the smallest variable
            // index.
            let mut leave: Option<(f64, usize)> = None; // (t, basis position)
            for k in 0..self.m {
                let rate = sigma * w[k];
                let var = self.basis[k];
                let t = if rate > PIVOT_TOL {
                    (x_basic[k].max(0.0)) / rate
                } else if rate < -PIVOT_TOL {
                    let ub = self.upper_bound(var);
                    if ub.is_finite() {
                        ((ub - x_basic[k]).max(0.0)) / -rate
                    } else {
                        continue;
                    }
                } else {
                    continue;
                };
                let better = match leave {
                    None => true,
                    Some((best_t, best_k)) => {
                        t < best_t || (t == best_t && var < self.basis[best_k])
                    }
                };
                if better {
                    leave = Some((t, k));
                }
            }
            let t_flip = self.upper_bound(q); // ub - lb, lb = 0

            match leave {
                Some((t, k)) if t <= t_flip => {
                    // Leaving variable exits to the bound it hit.
                    let leaving = self.basis[k];
                    let hit_upper = sigma * w[k] < 0.0;
                    self.basis[k] = q;
                    self.basis_pos[q] = k;
                    self.basis_pos[leaving] = usize::MAX;
                    self.at_upper[leaving] = hit_upper;
                    self.at_upper[q] = false;
                }
                _ => {
                    if !t_flip.is_finite() {
                        return Err(LpError::UnboundedDirection);
                    }
                    self.at_upper[q] = !self.at_upper[q];
                }
            }
        }
    }
}

/// Solve the LP relaxation of a normalized instance to optimality.
///
/// The relaxation is always feasible (`x = 0`) and bounded (`x <= 1`), so the
/// result is `Optimal` unless the iteration cap is hit. Variables whose
/// column is all zero are set to 1: they consume nothing.
pub fn solve_lp(
    inst: &NormalizedInstance,
    max_iters: usize,
) -> Result<FractionalSolution, LpError> {
    let mut simplex = Simplex::new(inst);
    let (x_basic, iterations) = simplex.run(max_iters)?;

    let n = simplex.n;
    let mut x = vec![0.0; n];
    for (var, xv) in x.iter_mut().enumerate() {
        let k = simplex.basis_pos[var];
        let raw = if k != usize::MAX {
            x_basic[k]
        } else if simplex.at_upper[var] {
            1.0
        } else {
            0.0
        };
        *xv = raw.clamp(0.0, 1.0);
    }
    for j in inst.base().zero_columns() {
        x[j] = 1.0;
    }

    let lu =
        LuFactors::factor(simplex.basis_matrix(), simplex.m).ok_or(LpError::SingularBasis {
            iteration: iterations,
        })?;
    let c_basic: Vec<f64> = simplex.basis.iter().map(|&v| simplex.cost_of(v)).collect();
    let duals = lu.solve_transpose(&c_basic);

    let objective = inst
        .base()
        .costs()
        .iter()
        .zip(&x)
        .map(|(&c, &v)| c * v)
        .sum();
    Ok(FractionalSolution {
        x,
        objective,
        status: LpStatus::Optimal,
        duals,
        basis: simplex.basis,
        iterations,
    })
}

/// Ratio of the LP relaxation optimum to the integer optimum, with the
/// denominator floored at 1.
pub fn lp_objective_gap(lp_objective: f64, ip_opt: f64) -> f64 {
    lp_objective / ip_opt.max(1.0)
}

/// Iteration budget generous enough for desk-scale instances; hitting it
/// signals numerical trouble rather than problem size.
pub fn default_max_iters(n: usize, m: usize) -> usize {
    200 * (n + m) + 10_000
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete_graph, mis_to_pip};
    use crate::instance::PipInstance;

    const MAX_ITERS: usize = 10_000;

    fn normalized(c: Vec<f64>, a: Vec<Vec<f64>>, b: Vec<f64>) -> NormalizedInstance {
        PipInstance::from_dense(c, a, b)
            .unwrap()
            .normalize()
            .unwrap()
    }

    fn check_primal_feasible(inst: &NormalizedInstance, sol: &FractionalSolution) {
        for &xj in &sol.x {
            assert!((-1e-9..=1.0 + 1e-9).contains(&xj), "x out of box: {xj}");
        }
        for (i, row) in inst.base().rows().enumerate() {
            let load: f64 = row.iter().map(|&(j, v)| v * sol.x[j]).sum();
            assert!(
                load <= inst.base().capacities()[i] + 1e-9,
                "row {i} violated: {load}"
            );
        }
        let recomputed: f64 = inst
            .base()
            .costs()
            .iter()
            .zip(&sol.x)
            .map(|(&c, &x)| c * x)
            .sum();
        assert!((recomputed - sol.objective).abs() <= 1e-9 * recomputed.abs().max(1.0));
    }

    #[test]
    fn both_items_fit() {
        let inst = normalized(vec![1.0, 1.0], vec![vec![1.0, 1.0]], vec![2.0]);
        let sol = solve_lp(&inst, MAX_ITERS).unwrap();
        assert!((sol.objective - 2.0).abs() < 1e-9);
        assert!((sol.x[0] - 1.0).abs() < 1e-9);
        assert!((sol.x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unit_knapsack_prefers_valuable_item() {
        let inst = normalized(vec![2.0, 1.0], vec![vec![1.0, 1.0]], vec![1.0]);
        let sol = solve_lp(&inst, MAX_ITERS).unwrap();
        assert!((sol.objective - 2.0).abs() < 1e-9);
        assert!((sol.x[0] - 1.0).abs() < 1e-9);
        assert!(sol.x[1].abs() < 1e-9);
        check_primal_feasible(&inst, &sol);
    }

    #[test]
    fn complete_graph_reduction_symmetric_optimum() {
        // On the K_n reduction the unique LP optimum is x_v = n/(2n-1),
        // certified by the matching symmetric dual. For n = 6: 36/11.
        let inst = mis_to_pip(&complete_graph(6)).normalize().unwrap();
        let sol = solve_lp(&inst, MAX_ITERS).unwrap();
        assert!(
            (sol.objective - 36.0 / 11.0).abs() < 1e-9,
            "{}",
            sol.objective
        );
        for &xv in &sol.x {
            assert!((xv - 6.0 / 11.0).abs() < 1e-7, "{xv}");
        }
        check_primal_feasible(&inst, &sol);

        let dual_obj = sol.dual_objective(&inst);
        assert!((dual_obj - sol.objective).abs() <= 1e-7 * sol.objective.abs().max(1.0));
        // y >= 0 makes (y, z) dual feasible, so the match certifies
        // optimality by weak duality.
        assert!(sol.duals.iter().all(|&y| y >= -1e-9));
    }

    #[test]
    fn zero_column_variable_pinned_to_one() {
        let inst = normalized(vec![0.5, 1.0], vec![vec![0.0, 1.0]], vec![1.0]);
        let sol = solve_lp(&inst, MAX_ITERS).unwrap();
        assert_eq!(sol.x[0], 1.0);
        assert!((sol.objective - 1.5).abs() < 1e-9);
    }

    #[test]
    fn deterministic_resolve() {
        let inst = normalized(
            vec![3.0, 1.0, 2.0, 0.7],
            vec![
                vec![1.0, 0.3, 0.9, 0.2],
                vec![0.5, 1.0, 0.0, 0.8],
                vec![0.2, 0.6, 1.0, 0.4],
            ],
            vec![2.0, 2.0, 2.0],
        );
        let a = solve_lp(&inst, MAX_ITERS).unwrap();
        let b = solve_lp(&inst, MAX_ITERS).unwrap();
        assert_eq!(a.x, b.x);
        assert_eq!(a.objective, b.objective);
        assert_eq!(a.basis, b.basis);
    }

    #[test]
    fn duality_gap_small_on_random_instances() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for trial in 0..40 {
            let n = rng.gen_range(1..=10);
            let m = rng.gen_range(1..=6);
            let mut rows = vec![vec![0.0; n]; m];
            let pins: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
            for (j, &pin) in pins.iter().enumerate() {
                rows[pin][j] = 1.0;
            }
            for row in rows.iter_mut() {
                for v in row.iter_mut() {
                    if *v == 0.0 && rng.gen_bool(0.5) {
                        *v = rng.gen_range(0.0..1.0);
                    }
                }
            }
            let c: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0)).collect();
            let w = rng.gen_range(1.0..6.0);
            let inst = normalized(c, rows, vec![w; m]);
            let sol = solve_lp(&inst, MAX_ITERS).unwrap();
            check_primal_feasible(&inst, &sol);
            let dual_obj = sol.dual_objective(&inst);
            assert!(
                (dual_obj - sol.objective).abs() <= 1e-7 * sol.objective.abs().max(1.0),
                "trial {trial}: primal {} vs dual {dual_obj}",
                sol.objective
            );
            assert!(sol.duals.iter().all(|&y| y >= -1e-9), "trial {trial}: negative dual");
        }
    }

    #[test]
    fn relaxation_dominates_integer_optimum() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..25 {
            let n = rng.gen_range(1..=12);
            let m = rng.gen_range(1..=4);
            let mut rows = vec![vec![0.0; n]; m];
            let pins: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
            for (j, &pin) in pins.iter().enumerate() {
                rows[pin][j] = 1.0;
            }
            for row in rows.iter_mut() {
                for v in row.iter_mut() {
                    if *v == 0.0 && rng.gen_bool(0.4) {
                        *v = rng.gen_range(0.0..1.0);
                    }
                }
            }
            let c: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
            let w = rng.gen_range(1.0..4.0);
            let inst = PipInstance::from_dense(c, rows, vec![w; m]).unwrap();
            let norm = inst.clone().normalize().unwrap();
            let sol = solve_lp(&norm, MAX_ITERS).unwrap();

            let mut best = 0.0f64;
            for mask in 0u32..(1 << n) {
                let x: Vec<bool> = (0..n).map(|j| mask >> j & 1 == 1).collect();
                if inst.is_feasible(&x) {
                    best = best.max(inst.value_of(&x));
                }
            }
            assert!(
                sol.objective >= best - 1e-7,
                "LP {} < IP {best}",
                sol.objective
            );
        }
    }

    #[test]
    fn objective_gap_examples() {
        assert_eq!(lp_objective_gap(7.0, 7.0), 1.0);
        // K6 reduction: LP 36/11 against integer optimum 1.
        assert!((lp_objective_gap(36.0 / 11.0, 1.0) - 36.0 / 11.0).abs() < 1e-12);
        // K12: 144/23, and sub-1 integer optima are floored to 1.
        assert!((lp_objective_gap(144.0 / 23.0, 1.0) - 6.260869565217391).abs() < 1e-12);
        assert_eq!(lp_objective_gap(3.0, 0.5), 3.0);
    }

    #[test]
    fn desk_scale_instance_solves() {
        let inst = crate::generators::random_instance(300, 60, 4.0, 0.1, 2024)
            .normalize()
            .unwrap();
        let sol = solve_lp(&inst, default_max_iters(300, 60)).unwrap();
        check_primal_feasible(&inst, &sol);
        let dual_obj = sol.dual_objective(&inst);
        assert!((dual_obj - sol.objective).abs() <= 1e-7 * sol.objective.abs().max(1.0));
        assert!(sol.objective > 0.0);
    }

    #[test]
    fn iteration_limit_is_reported() {
        let inst = normalized(vec![1.0, 1.0], vec![vec![1.0, 1.0]], vec![2.0]);
        match solve_lp(&inst, 0) {
            Err(LpError::IterationLimit { .. }) => {}
            other => panic!("expected IterationLimit, got {other:?}"),
        }
    }
}
