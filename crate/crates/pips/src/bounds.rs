//! Executable tail bounds and inequalities used by the rejection-probability
//! analysis, exposed so property tests and the `verify-bounds` command can
//! check them against Monte-Carlo estimates and dense parameter grids.

use rand::Rng;

/// Comparison slack for the inequality predicates, applied in log space.
/// The lemmas are tight at interior points (e.g. `x = 1/e`), where exact
/// floating-point comparison would be a coin flip.
const LOG_TOL: f64 = 1e-12;

/// Parameters of the upper-tail bound for a sum of independent random
/// variables `X_i in [0, beta]` with mean at most `alpha * W`.
#[derive(Debug, Clone, Copy)]
pub struct ChernoffParams {
    pub alpha: f64,
    pub width: f64,
    /// Largest possible summand, in `(0, 1]`.
    pub beta: f64,
    /// Upper bound on the mean of the sum; at most `alpha * width`.
    pub mu: f64,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum BoundsError {
    #[error("chernoff precondition violated: need (1 - alpha) W >= beta, 0 < alpha < 1, beta in (0,1], W >= 1, mu <= alpha W (alpha={alpha}, W={width}, beta={beta}, mu={mu})")]
    PreconditionViolated {
        alpha: f64,
        width: f64,
        beta: f64,
        mu: f64,
    },
    #[error("argument {name} = {value} outside domain {domain}")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
}

impl ChernoffParams {
    pub fn new(alpha: f64, width: f64, beta: f64, mu: f64) -> Result<ChernoffParams, BoundsError> {
        // Equality (1 - alpha) W = beta is admitted: the bound evaluates to
        // e^{alpha} >= 1 there, trivially valid.
        let ok = alpha > 0.0
            && alpha < 1.0
            && width >= 1.0
            && beta > 0.0
            && beta <= 1.0
            && (1.0 - alpha) * width >= beta
            && mu <= alpha * width + 1e-12;
        if ok {
            Ok(ChernoffParams {
                alpha,
                width,
                beta,
                mu,
            })
        } else {
            Err(BoundsError::PreconditionViolated {
                alpha,
                width,
                beta,
                mu,
            })
        }
    }
}

/// Upper bound on `Pr[sum X_i > W - beta]`:
///
/// ```text
/// (alpha e^{1-alpha} W / (W - beta))^{(W - beta)/beta}
/// ```
///
/// Evaluated in log space so large exponents neither overflow nor
/// underflow. The bound may exceed 1 (vacuous) for aggressive parameters.
pub fn chernoff_tail(p: &ChernoffParams) -> f64 {
    let exponent = (p.width - p.beta) / p.beta;
    let log_base = p.alpha.ln() + (1.0 - p.alpha) + p.width.ln() - (p.width - p.beta).ln();
    (exponent * log_base).exp()
}

/// Classical multiplicative form `(e^delta / (1+delta)^{1+delta})^{mu/beta}`
/// for `Pr[X >= (1 + delta) mu]`. The convenient form above follows from it
/// by choosing `(1 + delta) mu = W - beta`; kept private as a cross-check.
#[allow(dead_code)]
fn chernoff_tail_classic(delta: f64, mu: f64, beta: f64) -> f64 {
    let log_val = (delta - (1.0 + delta) * (1.0 + delta).ln()) * mu / beta;
    log_val.exp()
}

/// `(1/e^{1/e})^{1/x} <= x` for `x in (0, 1]`.
pub fn lemma_a3_holds(x: f64) -> Result<bool, BoundsError> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(BoundsError::OutOfDomain {
            name: "x",
            value: x,
            domain: "(0, 1]",
        });
    }
    // log: -1/(e x) <= ln x
    Ok(-1.0 / (std::f64::consts::E * x) <= x.ln() + LOG_TOL)
}

/// `x/y >= (1/e^{2/e})^{y/(2x)}` for `x in (0, 1]`, `y >= 2`.
pub fn lemma_a4_holds(x: f64, y: f64) -> Result<bool, BoundsError> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(BoundsError::OutOfDomain {
            name: "x",
            value: x,
            domain: "(0, 1]",
        });
    }
    if y < 2.0 {
        return Err(BoundsError::OutOfDomain {
            name: "y",
            value: y,
            domain: "[2, inf)",
        });
    }
    // log: ln(x/y) >= -y/(e x)
    Ok((x / y).ln() >= -y / (std::f64::consts::E * x) - LOG_TOL)
}

/// `eps x / 2 >= (eps/e^{2/e})^{1/x}` for `eps, x in (0, 1]`.
pub fn lemma_a5_holds(eps: f64, x: f64) -> Result<bool, BoundsError> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(BoundsError::OutOfDomain {
            name: "eps",
            value: eps,
            domain: "(0, 1]",
        });
    }
    if !(x > 0.0 && x <= 1.0) {
        return Err(BoundsError::OutOfDomain {
            name: "x",
            value: x,
            domain: "(0, 1]",
        });
    }
    // log: ln(eps x / 2) >= (ln eps - 2/e)/x
    let lhs = (eps * x / 2.0).ln();
    let rhs = (eps.ln() - 2.0 / std::f64::consts::E) / x;
    Ok(lhs >= rhs - LOG_TOL)
}

/// Monte-Carlo estimate of a weighted-Bernoulli tail.
#[derive(Debug, Clone, Copy)]
pub struct TailEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
}

/// Unbiased estimate of `Pr[sum_l coeffs[l] * Bernoulli(probs[l]) > threshold]`
/// with its binomial standard error.
pub fn monte_carlo_tail<R: Rng>(
    coeffs: &[f64],
    probs: &[f64],
    threshold: f64,
    samples: u64,
    rng: &mut R,
) -> TailEstimate {
    assert_eq!(coeffs.len(), probs.len());
    assert!(samples >= 1);
    let mut hits = 0u64;
    for _ in 0..samples {
        let mut total = 0.0;
        for (&c, &p) in coeffs.iter().zip(probs) {
            if rng.gen::<f64>() < p {
                total += c;
            }
        }
        if total > threshold {
            hits += 1;
        }
    }
    let estimate = hits as f64 / samples as f64;
    TailEstimate {
        estimate,
        std_error: (estimate * (1.0 - estimate) / samples as f64).sqrt(),
        samples,
    }
}

/// Grid and Monte-Carlo verification of the bounds in this module. The
/// `verify-bounds` command prints these as a table; the acceptance suite
/// asserts zero violations.
pub mod verification {
    use super::*;
    use rand::SeedableRng;

    #[derive(Debug, Clone, Copy)]
    pub struct CheckResult {
        pub name: &'static str,
        pub cases: u64,
        pub violations: u64,
    }

    impl CheckResult {
        pub fn passed(&self) -> bool {
            self.violations == 0
        }
    }

    /// `x in {1e-4, 2e-4, ..., 1}`.
    pub fn grid_a3() -> CheckResult {
        let mut violations = 0;
        let cases = 10_000u64;
        for k in 1..=cases {
            let x = (k as f64 * 1e-4).min(1.0);
            if !lemma_a3_holds(x).expect("grid point in domain") {
                violations += 1;
            }
        }
        CheckResult {
            name: "lemma-a3-grid",
            cases,
            violations,
        }
    }

    /// `x in (0,1]` step 1e-3 crossed with `y in {2, 2.5, ..., 50}`.
    pub fn grid_a4() -> CheckResult {
        let mut violations = 0;
        let mut cases = 0;
        for yk in 0..=96 {
            let y = 2.0 + 0.5 * yk as f64;
            for xk in 1..=1000 {
                let x = (xk as f64 * 1e-3).min(1.0);
                cases += 1;
                if !lemma_a4_holds(x, y).expect("grid point in domain") {
                    violations += 1;
                }
            }
        }
        CheckResult {
            name: "lemma-a4-grid",
            cases,
            violations,
        }
    }

    /// `eps, x` product grid, both step 1e-3.
    pub fn grid_a5() -> CheckResult {
        let mut violations = 0;
        let mut cases = 0;
        for ek in 1..=1000 {
            let eps = (ek as f64 * 1e-3).min(1.0);
            for xk in 1..=1000 {
                let x = (xk as f64 * 1e-3).min(1.0);
                cases += 1;
                if !lemma_a5_holds(eps, x).expect("grid point in domain") {
                    violations += 1;
                }
            }
        }
        CheckResult {
            name: "lemma-a5-grid",
            cases,
            violations,
        }
    }

    /// 500 random parameter draws with concrete coefficient vectors
    /// satisfying the preconditions; the bound must dominate the
    /// Monte-Carlo estimate up to four standard errors.
    pub fn chernoff_vs_monte_carlo(seed: u64, samples: u64) -> CheckResult {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut violations = 0;
        let mut cases = 0u64;
        while cases < 500 {
            let width = rng.gen_range(1.0..10.0);
            let beta = rng.gen_range(0.02..1.0);
            let max_alpha = (1.0f64 - beta / width).min(0.97);
            if max_alpha <= 0.02 {
                continue;
            }
            let alpha = rng.gen_range(0.02..max_alpha);
            let k = rng.gen_range(1..50);
            let coeffs: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..beta)).collect();
            let mut probs: Vec<f64> = (0..k).map(|_| rng.gen::<f64>()).collect();
            let mu_raw: f64 = coeffs.iter().zip(&probs).map(|(c, p)| c * p).sum();
            let target = alpha * width;
            if mu_raw > target {
                let scale = target / mu_raw;
                for p in probs.iter_mut() {
                    *p *= scale;
                }
            }
            let mu: f64 = coeffs.iter().zip(&probs).map(|(c, p)| c * p).sum();
            let params = match ChernoffParams::new(alpha, width, beta, mu) {
                Ok(p) => p,
                Err(_) => continue,
            };
            cases += 1;
            let bound = chernoff_tail(&params);
            let est = monte_carlo_tail(&coeffs, &probs, width - beta, samples, &mut rng);
            if est.estimate > bound + 4.0 * est.std_error + 1e-9 {
                violations += 1;
            }
        }
        CheckResult {
            name: "chernoff-vs-monte-carlo",
            cases,
            violations,
        }
    }

    /// The tail bound must be nondecreasing in alpha on `(0, (W-beta)/W)`.
    pub fn chernoff_monotone_in_alpha() -> CheckResult {
        let mut violations = 0;
        let mut cases = 0;
        for &(width, beta) in &[(2.0, 1.0), (4.0, 0.5), (10.0, 0.9), (1.5, 0.3)] {
            let cap = (width - beta) / width;
            let mut prev = 0.0;
            let mut alpha = cap / 200.0;
            while alpha < cap {
                let p = ChernoffParams::new(alpha, width, beta, alpha * width)
                    .expect("grid respects the precondition");
                let t = chernoff_tail(&p);
                cases += 1;
                if t + 1e-15 < prev {
                    violations += 1;
                }
                prev = t;
                alpha += cap / 200.0;
            }
        }
        CheckResult {
            name: "chernoff-monotone-alpha",
            cases,
            violations,
        }
    }

    /// Every check, in report order.
    pub fn all_checks(seed: u64, samples: u64) -> Vec<CheckResult> {
        vec![
            grid_a3(),
            grid_a4(),
            grid_a5(),
            chernoff_vs_monte_carlo(seed, samples),
            chernoff_monotone_in_alpha(),
        ]
    }
}
