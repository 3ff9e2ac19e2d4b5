//! Closed-form approximate stability boundaries from multi-scale
//! perturbation theory.
//!
//! Expanding `a = a0 + a1 q + a2 q²` and suppressing secular growth on the
//! slow time scale yields boundary curves accurate to O(q³):
//!
//! - around a = 0, the coupled pair `a = −q²/2` and `a = q²/(2α)`
//!   (θ-independent — identical to what decoupled analyses would give);
//! - around a = 1, the coupled curve
//!   `a = 1 − |c|q − (c²/8 + 2s²(5+α)/((1+α)(9+α))) q²`;
//! - around a = −1/α, the image of the previous curve under the variable
//!   exchange (x↔y, a → −αa, α → 1/α);
//! - the decoupled references `a = 1 ± q − q²/8` and their `−1/α`-scaled
//!   counterparts.
//!
//! The |c| convention: the first-order term takes the sign that bounds the
//! primary stable region, and for θ > 45° the curves are evaluated at
//! 90° − θ, which the system's angle symmetry makes equivalent.

use crate::error::{Error, Result};
use crate::hill::{BoundaryCurve, CurveMethod};
use crate::params::{cos_sin_two_theta, TrapParams};

/// Coefficients of the expansion `a(q) = a0 + a1 q + a2 q²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiscaleCoeffs {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
}

impl MultiscaleCoeffs {
    /// Evaluates the boundary at the given RF strength.
    pub fn eval(&self, q: f64) -> f64 {
        self.a0 + (self.a1 + self.a2 * q) * q
    }

    /// Lower boundary of the a ≈ 0 stable strip: `a = −q²/2`.
    pub fn a0_lower() -> Self {
        Self {
            a0: 0.0,
            a1: 0.0,
            a2: -0.5,
        }
    }

    /// Upper boundary of the a ≈ 0 stable strip: `a = q²/(2α)`.
    pub fn a0_upper(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self {
            a0: 0.0,
            a1: 0.0,
            a2: 0.5 / alpha,
        })
    }

    /// Coupled boundary descending from a = 1.
    pub fn a1_coupled(alpha: f64, theta: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let (c, s) = angle_terms(theta)?;
        Ok(Self {
            a0: 1.0,
            a1: -c,
            a2: -(c * c / 8.0 + 2.0 * s * s * (5.0 + alpha) / ((1.0 + alpha) * (9.0 + alpha))),
        })
    }

    /// Coupled boundary rising from a = −1/α: the a = 1 curve after the
    /// exchange of variables, which maps α to 1/α and a to −αa.
    pub fn a_neg_coupled(alpha: f64, theta: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let (c, s) = angle_terms(theta)?;
        let b = 1.0 / alpha;
        let a2_pos = c * c / 8.0 + 2.0 * s * s * (5.0 + b) / ((1.0 + b) * (9.0 + b));
        Ok(Self {
            a0: -b,
            a1: c * b,
            a2: a2_pos * b,
        })
    }

    /// Decoupled branch `a = 1 ± q − q²/8`.
    pub fn decoupled_a1(plus: bool) -> Self {
        Self {
            a0: 1.0,
            a1: if plus { 1.0 } else { -1.0 },
            a2: -0.125,
        }
    }

    /// Decoupled branch `a = −(1/α)(1 ± q − q²/8)`.
    pub fn decoupled_a_neg(alpha: f64, plus: bool) -> Result<Self> {
        check_alpha(alpha)?;
        let b = 1.0 / alpha;
        Ok(Self {
            a0: -b,
            a1: if plus { -b } else { b },
            a2: 0.125 * b,
        })
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "alpha must be positive and finite, got {alpha}"
        )));
    }
    Ok(())
}

/// Normalized `(|cos 2θ|, sin 2θ)` implementing the |c| sign convention.
fn angle_terms(theta: f64) -> Result<(f64, f64)> {
    let norm = TrapParams::new(0.0, 0.0, 1.0, theta)?.theta;
    let (c, s) = cos_sin_two_theta(norm);
    Ok((c.abs(), s))
}

fn check_q_samples(q_samples: &[f64]) -> Result<()> {
    if q_samples.is_empty() {
        return Err(Error::InvalidParams("no q samples given".into()));
    }
    for q in q_samples {
        if !q.is_finite() || *q < 0.0 {
            return Err(Error::InvalidParams(format!(
                "q samples must be finite and nonnegative, got {q}"
            )));
        }
    }
    for w in q_samples.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::InvalidParams(format!(
                "q samples must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

fn sampled(label: &str, method: CurveMethod, coeffs: MultiscaleCoeffs, qs: &[f64]) -> BoundaryCurve {
    BoundaryCurve {
        label: label.to_string(),
        method,
        points: qs.iter().map(|&q| (q, coeffs.eval(q))).collect(),
    }
}

/// The four coupled multi-scale boundaries, sampled at the given q values:
/// `a0_lower`, `a0_upper`, `a1_coupled`, and `a_neg_coupled`.
pub fn coupled_boundaries(
    alpha: f64,
    theta: f64,
    q_samples: &[f64],
) -> Result<Vec<BoundaryCurve>> {
    check_q_samples(q_samples)?;
    let m = CurveMethod::MultiScale;
    Ok(vec![
        sampled("a0_lower", m, MultiscaleCoeffs::a0_lower(), q_samples),
        sampled("a0_upper", m, MultiscaleCoeffs::a0_upper(alpha)?, q_samples),
        sampled(
            "a1_coupled",
            m,
            MultiscaleCoeffs::a1_coupled(alpha, theta)?,
            q_samples,
        ),
        sampled(
            "a_neg_coupled",
            m,
            MultiscaleCoeffs::a_neg_coupled(alpha, theta)?,
            q_samples,
        ),
    ])
}

/// The four decoupled reference boundaries (± branches at a = 1 and at
/// a = −1/α), for overlays: `a1_plus`, `a1_minus`, `a_neg_plus`,
/// `a_neg_minus`.
pub fn decoupled_boundaries(alpha: f64, q_samples: &[f64]) -> Result<Vec<BoundaryCurve>> {
    check_q_samples(q_samples)?;
    let m = CurveMethod::DecoupledMultiScale;
    Ok(vec![
        sampled("a1_plus", m, MultiscaleCoeffs::decoupled_a1(true), q_samples),
        sampled("a1_minus", m, MultiscaleCoeffs::decoupled_a1(false), q_samples),
        sampled(
            "a_neg_plus",
            m,
            MultiscaleCoeffs::decoupled_a_neg(alpha, true)?,
            q_samples,
        ),
        sampled(
            "a_neg_minus",
            m,
            MultiscaleCoeffs::decoupled_a_neg(alpha, false)?,
            q_samples,
        ),
    ])
}
