//! Parametrization of the coupled Mathieu system.
//!
//! The radial ion motion reduces to a pair of coupled Mathieu equations in
//! scaled time τ,
//!
//! ```text
//! x″ + a x + 2q (c x + s y) cos 2τ = 0
//! y″ − αa y + 2q (s x − c y) cos 2τ = 0
//! ```
//!
//! with `c = cos 2θ`, `s = sin 2θ`. This module owns the operating-point
//! type and the construction of the DC matrix `A = diag(a, −αa)` and the
//! traceless RF matrix `Q = q [[c, s], [s, −c]]`.

use crate::error::{Error, Result};
use nalgebra::{Matrix2, Vector4};

/// Dimensionless operating point (q, a, α, θ) of the coupled system.
///
/// Constructed through [`TrapParams::new`], which rejects invalid values and
/// folds the angle into `[0, 90]` degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapParams {
    /// RF strength.
    pub q: f64,
    /// DC strength; either sign is physical.
    pub a: f64,
    /// DC anisotropy ratio; strictly positive.
    pub alpha: f64,
    /// Angle between the RF and DC principal axes, in degrees, normalized
    /// into `[0, 90]`.
    pub theta: f64,
}

impl TrapParams {
    /// Validates the operating point and normalizes the angle.
    ///
    /// `alpha` must be finite and positive; all other inputs merely finite.
    /// Angles outside `[0, 90]`° are folded using the 2θ-periodicity of the
    /// coefficient matrices: θ → θ mod 180, then θ → 180 − θ when above 90.
    pub fn new(q: f64, a: f64, alpha: f64, theta: f64) -> Result<Self> {
        if !q.is_finite() || !a.is_finite() || !alpha.is_finite() || !theta.is_finite() {
            return Err(Error::InvalidParams(format!(
                "non-finite input: q={q}, a={a}, alpha={alpha}, theta={theta}"
            )));
        }
        if alpha <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        Ok(Self {
            q,
            a,
            alpha,
            theta: normalize_theta(theta),
        })
    }
}

/// Folds an arbitrary angle in degrees into `[0, 90]`.
fn normalize_theta(theta: f64) -> f64 {
    let t = theta.rem_euclid(180.0);
    if t > 90.0 {
        180.0 - t
    } else {
        t
    }
}

/// Coefficient matrices of the coupled system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientMatrices {
    /// DC matrix `A = diag(a, −αa)`; diagonal in this parametrization.
    pub a_mat: Matrix2<f64>,
    /// RF matrix `Q = q [[cos 2θ, sin 2θ], [sin 2θ, −cos 2θ]]`; symmetric
    /// and exactly traceless.
    pub q_mat: Matrix2<f64>,
}

/// State of the first-order system: `(x, y, dx/dτ, dy/dτ)`.
pub type StateVector = Vector4<f64>;

/// Builds the DC and RF coefficient matrices for an operating point.
///
/// The trace of `Q` is zero by construction (the diagonal holds `±q cos 2θ`
/// from the same evaluation), not by subtraction of rounded values.
pub fn build_matrices(params: TrapParams) -> Result<CoefficientMatrices> {
    // Re-validate: TrapParams fields are public, so a hand-rolled literal
    // could bypass `new`.
    let p = TrapParams::new(params.q, params.a, params.alpha, params.theta)?;
    let (c, s) = cos_sin_two_theta(p.theta);
    let qc = p.q * c;
    let qs = p.q * s;
    Ok(CoefficientMatrices {
        a_mat: Matrix2::new(p.a, 0.0, 0.0, -p.alpha * p.a),
        q_mat: Matrix2::new(qc, qs, qs, -qc),
    })
}

/// Right-hand side of the first-order form `u′ = G(τ) u` with
/// `G = [[0, I], [−A − 2Q cos 2τ, 0]]`; `G` is traceless, so the flow is
/// volume preserving.
pub fn rhs(tau: f64, u: &StateVector, m: &CoefficientMatrices) -> StateVector {
    let f = force_matrix(m, tau);
    Vector4::new(
        u[2],
        u[3],
        f[(0, 0)] * u[0] + f[(0, 1)] * u[1],
        f[(1, 0)] * u[0] + f[(1, 1)] * u[1],
    )
}

/// Position-block coefficient `−A − 2Q cos 2τ` of the first-order form.
pub(crate) fn force_matrix(m: &CoefficientMatrices, tau: f64) -> Matrix2<f64> {
    let c2t = (2.0 * tau).cos();
    -(m.a_mat + m.q_mat * (2.0 * c2t))
}

/// sin and cos of an angle in degrees restricted to `[0, 90]`, exact at the
/// endpoints and at 45° so quadrant symmetries hold bitwise.
fn sin_cos_deg_quadrant(deg: f64) -> (f64, f64) {
    if deg == 0.0 {
        (0.0, 1.0)
    } else if deg == 45.0 {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        (r, r)
    } else if deg == 90.0 {
        (1.0, 0.0)
    } else {
        let r = deg.to_radians();
        (r.sin(), r.cos())
    }
}

/// `(cos 2θ, sin 2θ)` for θ in degrees within `[0, 90]`.
///
/// The obtuse half of 2θ is mirrored onto `[0, 90]`° so θ and 90° − θ give
/// exactly opposite cosines and bitwise-identical sines, the matrix form of
/// the system's angle symmetry.
pub(crate) fn cos_sin_two_theta(theta: f64) -> (f64, f64) {
    let t2 = 2.0 * theta;
    if t2 <= 90.0 {
        let (s, c) = sin_cos_deg_quadrant(t2);
        (c, s)
    } else {
        let (s, c) = sin_cos_deg_quadrant(180.0 - t2);
        (-c, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn axis_aligned_matrices() {
        let p = TrapParams::new(1.0, 1.0, 0.5, 0.0).unwrap();
        let m = build_matrices(p).unwrap();
        assert_eq!(m.a_mat, Matrix2::new(1.0, 0.0, 0.0, -0.5));
        assert_eq!(m.q_mat, Matrix2::new(1.0, 0.0, 0.0, -1.0));
    }

    #[test]
    fn forty_five_degree_matrices() {
        let p = TrapParams::new(1.0, 0.0, 1.0, 45.0).unwrap();
        let m = build_matrices(p).unwrap();
        assert_eq!(m.a_mat, Matrix2::zeros());
        assert_eq!(m.q_mat, Matrix2::new(0.0, 1.0, 1.0, 0.0));
    }

    #[test]
    fn oblique_angle_matches_double_angle_identities() {
        // Independent evaluation of cos 2θ, sin 2θ through the half-angle.
        let p = TrapParams::new(2.0, 0.4, 0.5, 6.4).unwrap();
        let m = build_matrices(p).unwrap();
        let t = 6.4_f64.to_radians();
        let (c2, s2) = (t.cos().powi(2) - t.sin().powi(2), 2.0 * t.sin() * t.cos());
        assert_relative_eq!(m.q_mat[(0, 0)], 2.0 * c2, max_relative = 1e-14);
        assert_relative_eq!(m.q_mat[(0, 1)], 2.0 * s2, max_relative = 1e-14);
        assert_eq!(m.q_mat[(0, 1)], m.q_mat[(1, 0)]);
        assert_eq!(m.q_mat[(0, 0)] + m.q_mat[(1, 1)], 0.0);
        assert_eq!(m.a_mat[(0, 1)], 0.0);
        assert_eq!(m.a_mat[(1, 0)], 0.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(TrapParams::new(1.0, 1.0, 0.0, 0.0).is_err());
        assert!(TrapParams::new(1.0, 1.0, -0.5, 0.0).is_err());
        assert!(TrapParams::new(f64::NAN, 1.0, 1.0, 0.0).is_err());
        assert!(TrapParams::new(1.0, f64::INFINITY, 1.0, 0.0).is_err());
    }

    #[test]
    fn theta_normalization_folds_into_first_quadrant() {
        assert_eq!(TrapParams::new(0.0, 0.0, 1.0, 135.0).unwrap().theta, 45.0);
        assert_eq!(TrapParams::new(0.0, 0.0, 1.0, -30.0).unwrap().theta, 30.0);
        assert_eq!(TrapParams::new(0.0, 0.0, 1.0, 180.0).unwrap().theta, 0.0);
        assert_eq!(TrapParams::new(0.0, 0.0, 1.0, 90.0).unwrap().theta, 90.0);
        assert_eq!(TrapParams::new(0.0, 0.0, 1.0, 270.0).unwrap().theta, 90.0);
    }

    #[test]
    fn complementary_angles_flip_cosine_exactly() {
        for theta in [0.0, 22.5, 30.0, 45.0, 60.0, 67.5, 90.0] {
            let (c, s) = cos_sin_two_theta(theta);
            let (c2, s2) = cos_sin_two_theta(90.0 - theta);
            assert_eq!(c2, -c, "theta={theta}");
            assert_eq!(s2, s, "theta={theta}");
        }
        // Non-representable angles still agree to roundoff.
        for theta in [6.4, 12.0, 33.75, 37.3] {
            let (c, s) = cos_sin_two_theta(theta);
            let (c2, s2) = cos_sin_two_theta(90.0 - theta);
            assert_relative_eq!(c2, -c, max_relative = 1e-13, epsilon = 1e-15);
            assert_relative_eq!(s2, s, max_relative = 1e-13);
        }
    }

    #[test]
    fn rhs_is_linear_and_matches_closed_forms() {
        // Zero state maps to zero.
        let p = TrapParams::new(0.7, -0.3, 2.0, 10.0).unwrap();
        let m = build_matrices(p).unwrap();
        assert_eq!(rhs(0.4, &StateVector::zeros(), &m), StateVector::zeros());

        // q = 0: decoupled harmonic force −a·x.
        let p = TrapParams::new(0.0, 1.0, 0.5, 0.0).unwrap();
        let m = build_matrices(p).unwrap();
        let d = rhs(0.123, &StateVector::new(1.0, 0.0, 0.0, 0.0), &m);
        assert_eq!(d, StateVector::new(0.0, 0.0, -1.0, 0.0));

        // Pure RF coupling at θ = 45°, τ = 0: force −2Q·(1, 0) = (0, −2).
        let p = TrapParams::new(1.0, 0.0, 1.0, 45.0).unwrap();
        let m = build_matrices(p).unwrap();
        let d = rhs(0.0, &StateVector::new(1.0, 0.0, 0.0, 0.0), &m);
        assert_eq!(d, StateVector::new(0.0, 0.0, 0.0, -2.0));
    }
}
