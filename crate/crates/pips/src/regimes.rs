//! Width-regime selection and the regime-specific scaling factors.
//!
//! Every regime scales the fractional optimum by some `alpha` before
//! rounding; the alteration step then rejects each rounded item with total
//! probability at most `gamma`, giving an `alpha * (1 - gamma)`
//! approximation in expectation. The constants are evaluated from their
//! closed forms at startup rather than hard-coded as decimals.

use crate::instance::NormalizedInstance;
use std::f64::consts::E;

/// `c1 = 4 e^{1 + 1/e}`, scaling denominator of the plain `W >= 2` bound.
pub fn c1() -> f64 {
    4.0 * (1.0 + 1.0 / E).exp()
}

/// `c2 = 4 e^{1 + 2/e}`, denominator of the width-sensitive `W >= 2` bound.
pub fn c2() -> f64 {
    4.0 * (1.0 + 2.0 / E).exp()
}

/// `c3 = 8 e^{1 + 2/e}`, denominator of the `W = 1 + eps` bound.
pub fn c3() -> f64 {
    8.0 * (1.0 + 2.0 / E).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `W >= 2` with `alpha = 1/(c1 Delta_1)`.
    WeakW2,
    /// `W >= 2` with `alpha = 1/(c2 (1 + Delta_1/W)^{1/(W-1)})`.
    StrongW2,
    /// `W >= (2/eps^2) ln(Delta_1/eps) + 1` with `alpha = 1 - eps`.
    LargeW,
    /// `W = 1 + eps`, `eps in (0,1]`, with `alpha = eps^2/(c3 Delta_1)`.
    SmallWidth,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::WeakW2 => "weak",
            Regime::StrongW2 => "strong",
            Regime::LargeW => "largew",
            Regime::SmallWidth => "smallwidth",
        }
    }
}

/// Fully evaluated rounding configuration for one instance.
#[derive(Debug, Clone)]
pub struct RegimeConfig {
    pub regime: Regime,
    /// Scaling factor applied to the fractional solution, in `(0, 1]`.
    pub alpha: f64,
    /// Width surplus; present for `SmallWidth` (`W = 1 + eps`) and `LargeW`.
    pub eps: Option<f64>,
    /// Rejection budget of the analysis: `1/2` for the `Delta_1`-scaled
    /// regimes, `e * eps` for `LargeW`. Reported, never tuned.
    pub gamma: f64,
    pub constants: Constants,
}

#[derive(Debug, Clone, Copy)]
pub struct Constants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl Constants {
    pub fn evaluate() -> Constants {
        Constants {
            c1: c1(),
            c2: c2(),
            c3: c3(),
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum RegimeError {
    #[error(
        "width is 1: approximating this instance is as hard as maximum \
         independent set even at Delta_1 <= 2"
    )]
    WidthOne,
    #[error("eps = {eps} outside the valid range {range}")]
    EpsOutOfRange { eps: f64, range: &'static str },
    #[error("regime {regime} requires width >= {required}, instance has {width}")]
    WidthTooSmall {
        regime: &'static str,
        required: f64,
        width: f64,
    },
}

/// `alpha_1 = 1 / (c1 Delta_1)` for `W >= 2`.
pub fn alpha_weak(delta1: f64) -> f64 {
    1.0 / (c1() * delta1)
}

/// `alpha_1 = 1 / (c2 (1 + Delta_1/W)^{1/(W-1)})` for `W >= 2`; improves as
/// the width grows.
pub fn alpha_strong(delta1: f64, width: f64) -> f64 {
    1.0 / (c2() * (1.0 + delta1 / width).powf(1.0 / (width - 1.0)))
}

/// `alpha_1 = 1 - eps`, valid for `0 < eps < 1/e`.
pub fn alpha_large_w(eps: f64) -> Result<f64, RegimeError> {
    if eps <= 0.0 || eps >= 1.0 / E {
        return Err(RegimeError::EpsOutOfRange {
            eps,
            range: "(0, 1/e)",
        });
    }
    Ok(1.0 - eps)
}

/// `alpha_2 = eps^2 / (c3 Delta_1)` for `W = 1 + eps`.
pub fn alpha_small_width(eps: f64, delta1: f64) -> Result<f64, RegimeError> {
    if eps <= 0.0 || eps > 1.0 {
        return Err(RegimeError::EpsOutOfRange {
            eps,
            range: "(0, 1]",
        });
    }
    Ok(eps * eps / (c3() * delta1))
}

/// Width threshold `(2/eps^2) ln(Delta_1/eps) + 1` above which the
/// `1 - O(eps)` guarantee applies.
pub fn required_width_large_w(eps: f64, delta1: f64) -> f64 {
    (2.0 / (eps * eps)) * (delta1 / eps).ln() + 1.0
}

impl RegimeConfig {
    pub fn weak(delta1: f64) -> RegimeConfig {
        RegimeConfig {
            regime: Regime::WeakW2,
            alpha: alpha_weak(delta1),
            eps: None,
            gamma: 0.5,
            constants: Constants::evaluate(),
        }
    }

    pub fn strong(delta1: f64, width: f64) -> RegimeConfig {
        RegimeConfig {
            regime: Regime::StrongW2,
            alpha: alpha_strong(delta1, width),
            eps: None,
            gamma: 0.5,
            constants: Constants::evaluate(),
        }
    }

    pub fn large_w(eps: f64) -> Result<RegimeConfig, RegimeError> {
        Ok(RegimeConfig {
            regime: Regime::LargeW,
            alpha: alpha_large_w(eps)?,
            eps: Some(eps),
            gamma: E * eps,
            constants: Constants::evaluate(),
        })
    }

    pub fn small_width(eps: f64, delta1: f64) -> Result<RegimeConfig, RegimeError> {
        Ok(RegimeConfig {
            regime: Regime::SmallWidth,
            alpha: alpha_small_width(eps, delta1)?,
            eps: Some(eps),
            gamma: 0.5,
            constants: Constants::evaluate(),
        })
    }

    /// The analytical per-pair rejection bound for entry `a_ij`:
    /// `A_ij / (2 Delta_1)` for the `Delta_1`-scaled regimes and
    /// `e * eps * A_ij / Delta_1` for `LargeW`.
    pub fn rejection_bound(&self, a_ij: f64, delta1: f64) -> f64 {
        match self.regime {
            Regime::WeakW2 | Regime::StrongW2 | Regime::SmallWidth => a_ij / (2.0 * delta1),
            Regime::LargeW => E * self.eps.expect("LargeW carries eps") * a_ij / delta1,
        }
    }

    /// Verify that the instance's width admits this regime.
    pub fn check_width(&self, inst: &NormalizedInstance) -> Result<(), RegimeError> {
        let w = inst.width();
        match self.regime {
            Regime::WeakW2 | Regime::StrongW2 => {
                if w < 2.0 {
                    return Err(RegimeError::WidthTooSmall {
                        regime: self.regime.name(),
                        required: 2.0,
                        width: w,
                    });
                }
            }
            Regime::SmallWidth => {
                let eps = self.eps.expect("SmallWidth carries eps");
                if (w - (1.0 + eps)).abs() > 1e-9 {
                    return Err(RegimeError::WidthTooSmall {
                        regime: self.regime.name(),
                        required: 1.0 + eps,
                        width: w,
                    });
                }
            }
            Regime::LargeW => {
                let eps = self.eps.expect("LargeW carries eps");
                let required = required_width_large_w(eps, inst.delta1());
                if w < required {
                    return Err(RegimeError::WidthTooSmall {
                        regime: self.regime.name(),
                        required,
                        width: w,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Pick the regime from the instance statistics: `LargeW` when the width
/// clears the threshold for the hinted accuracy, otherwise `StrongW2` for
/// `W >= 2` (whose alpha dominates the small-width alpha at the `W = 2`
/// boundary), otherwise `SmallWidth` with `eps = W - 1`. Width exactly 1 is
/// refused: the problem is MIS-hard there.
pub fn select_regime(
    inst: &NormalizedInstance,
    eps_hint: Option<f64>,
) -> Result<RegimeConfig, RegimeError> {
    let w = inst.width();
    if let Some(eps) = eps_hint {
        if alpha_large_w(eps).is_ok() && w >= required_width_large_w(eps, inst.delta1()) {
            return RegimeConfig::large_w(eps);
        }
    }
    if w >= 2.0 {
        Ok(RegimeConfig::strong(inst.delta1(), w))
    } else if w > 1.0 {
        RegimeConfig::small_width(w - 1.0, inst.delta1())
    } else {
        Err(RegimeError::WidthOne)
    }
}

/// Default accuracy target used by "auto" selection when the caller asks
/// for a `1 - O(eps)` guarantee without naming eps.
pub const DEFAULT_EPS_HINT: f64 = 0.25;
