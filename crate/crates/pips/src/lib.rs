//! Approximation algorithms for packing integer programs (PIPs) of the form
//! `max { c·x : Ax <= b, x in {0,1}^n }` with nonnegative data, based on
//! randomized rounding of the LP relaxation followed by a per-constraint
//! alteration step that restores feasibility.
//!
//! The guarantees are parameterized by the width `W` (smallest capacity/entry
//! ratio) and the l1 column sparsity `Delta_1` (largest column sum after row
//! normalization), and split into three width regimes:
//!
//! * `W = 1 + eps`, `eps in (0,1]`: small/big item split, `Omega(eps^2/Delta_1)`.
//! * `W >= 2`: sorted-prefix alteration, `Omega((1/(1+Delta_1/W))^(1/(W-1)))`.
//! * `W >= (2/eps^2) ln(Delta_1/eps) + 1`: same alteration at scaling `1-eps`,
//!   giving `1 - O(eps)`.
//!
//! The crate also ships the supporting machinery used to check these claims
//! empirically: an exact branch-and-bound oracle, instance generators
//! (including the independent-set reduction showing `W = 1` is hard even at
//! `Delta_1 <= 2`), executable Chernoff/tail inequalities, and an experiment
//! harness that estimates per-constraint rejection probabilities against the
//! analytical bounds.
//!
//! ```
//! use pips::generators::random_instance;
//! use pips::lp::{default_max_iters, solve_lp};
//! use pips::regimes::select_regime;
//! use pips::rounding::round_and_alter;
//!
//! let inst = random_instance(30, 10, 4.0, 0.4, 7);
//! let norm = inst.clone().normalize()?;
//! let cfg = select_regime(&norm, None)?;
//! let frac = solve_lp(&norm, default_max_iters(30, 10))?;
//! let result = round_and_alter(&norm, &frac, &cfg, 1_000, 42)?;
//! assert!(inst.is_feasible(&result.best.x_double_prime));
//! assert!(result.best.value <= frac.objective);
//! # Ok::<(), pips::Error>(())
//! ```

pub mod bounds;
pub mod generators;
pub mod harness;
pub mod instance;
pub mod lp;
pub mod oracle;
pub mod regimes;
pub mod rng;
pub mod rounding;

pub use instance::{NormalizedInstance, PipInstance, Violation};
pub use lp::FractionalSolution;
pub use regimes::{Regime, RegimeConfig};
pub use rounding::RoundingOutcome;

/// Umbrella error for callers that do not care which stage failed.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Instance(#[from] instance::InstanceError),
    #[error(transparent)]
    Lp(#[from] lp::LpError),
    #[error(transparent)]
    Rounding(#[from] rounding::RoundingError),
    #[error(transparent)]
    Regime(#[from] regimes::RegimeError),
    #[error(transparent)]
    Bounds(#[from] bounds::BoundsError),
    #[error(transparent)]
    Oracle(#[from] oracle::OracleError),
    #[error(transparent)]
    Graph(#[from] generators::GraphError),
}
