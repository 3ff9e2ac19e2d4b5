//! Fixed-step propagation of the fundamental solution matrix over one period.
//!
//! The coupled system is linear with π-periodic coefficients, so long-time
//! behavior is governed by the monodromy matrix: the fundamental solution
//! `U(π)` of `dU/dτ = G(τ) U`, `U(0) = I`. A classical fourth-order
//! Runge–Kutta scheme with a fixed step count keeps grid sweeps
//! deterministic and embarrassingly parallel. The exact flow is symplectic
//! and volume preserving, which the residual helpers below exploit as
//! accuracy diagnostics.

use crate::error::{Error, Result};
use crate::params::{build_matrices, TrapParams};
use nalgebra::{Matrix2, Matrix2x4, Matrix4, Vector2};
use std::f64::consts::PI;

/// Integration scheme for the fundamental matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Classical fixed-step fourth-order Runge–Kutta.
    #[default]
    Rk4,
}

/// Fixed-step integrator configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntegratorConfig {
    /// Steps across one period `T = π`; at least [`IntegratorConfig::MIN_STEPS`].
    pub steps_per_period: usize,
    /// Integration scheme.
    pub method: Method,
}

impl Default for IntegratorConfig {
    /// 2048 steps per period: symplectic residual around 1e−10 over the
    /// sweep ranges of interest, cheap enough for dense grids.
    fn default() -> Self {
        Self {
            steps_per_period: 2048,
            method: Method::Rk4,
        }
    }
}

impl IntegratorConfig {
    /// Fewest steps per period accepted.
    pub const MIN_STEPS: usize = 16;

    /// RK4 configuration with a custom step count.
    pub fn with_steps(steps_per_period: usize) -> Result<Self> {
        let cfg = Self {
            steps_per_period,
            method: Method::Rk4,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.steps_per_period < Self::MIN_STEPS {
            return Err(Error::InvalidParams(format!(
                "steps_per_period must be at least {}, got {}",
                Self::MIN_STEPS,
                self.steps_per_period
            )));
        }
        Ok(())
    }
}

/// Mapping at a period: the fundamental solution matrix after one forcing
/// period, together with the operating point that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonodromyMatrix {
    /// `U(π)`, real 4×4.
    pub m: Matrix4<f64>,
    /// Operating point integrated.
    pub params: TrapParams,
}

impl MonodromyMatrix {
    /// Max-norm of `UᵀJU − J`; identically zero for the exact flow, so this
    /// measures integrator error against the canonical (symplectic)
    /// structure of the dynamics.
    pub fn symplectic_residual(&self) -> f64 {
        let j = symplectic_form();
        (self.m.transpose() * j * self.m - j).amax()
    }

    /// `|det U − 1|`; the flow is volume preserving (trace G ≡ 0), so this
    /// measures Liouville drift of the integrator.
    pub fn det_residual(&self) -> f64 {
        (self.m.determinant() - 1.0).abs()
    }
}

/// The canonical symplectic form `J = [[0, −I], [I, 0]]`.
pub fn symplectic_form() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 0.0, -1.0, 0.0, //
        0.0, 0.0, 0.0, -1.0, //
        1.0, 0.0, 0.0, 0.0, //
        0.0, 1.0, 0.0, 0.0,
    )
}

/// Integrates the monodromy matrix `U(π)` of the coupled system.
///
/// The 4×4 fundamental matrix is propagated in one pass, split into its
/// position block `X` (rows 1–2) and velocity block `V` (rows 3–4), for
/// which the first-order form reads `X′ = V`, `V′ = F(τ) X` with
/// `F(τ) = −A − 2Q cos 2τ`.
pub fn monodromy(params: TrapParams, cfg: IntegratorConfig) -> Result<MonodromyMatrix> {
    cfg.validate()?;
    let mats = build_matrices(params)?;
    let n = cfg.steps_per_period;
    let h = PI / n as f64;
    let (h2, h6) = (0.5 * h, h / 6.0);

    // F(τ) = an + c(τ)·qn with c = cos 2τ.
    let an = -mats.a_mat;
    let qn = mats.q_mat * -2.0;

    let mut x = Matrix2x4::new(
        1.0, 0.0, 0.0, 0.0, //
        0.0, 1.0, 0.0, 0.0,
    );
    let mut v = Matrix2x4::new(
        0.0, 0.0, 1.0, 0.0, //
        0.0, 0.0, 0.0, 1.0,
    );

    for i in 0..n {
        let t2 = 2.0 * (h * i as f64);
        let f0 = an + qn * t2.cos();
        let fm = an + qn * (t2 + h).cos();
        let f1 = an + qn * (t2 + 2.0 * h).cos();

        let k1v = f0 * x;
        let k2x = v + k1v * h2;
        let k2v = fm * (x + v * h2);
        let k3x = v + k2v * h2;
        let k3v = fm * (x + k2x * h2);
        let k4x = v + k3v * h;
        let k4v = f1 * (x + k3x * h);

        x += (v + (k2x + k3x) * 2.0 + k4x) * h6;
        v += (k1v + (k2v + k3v) * 2.0 + k4v) * h6;
    }

    let mut u = Matrix4::zeros();
    u.fixed_view_mut::<2, 4>(0, 0).copy_from(&x);
    u.fixed_view_mut::<2, 4>(2, 0).copy_from(&v);

    if !u.iter().all(|e| e.is_finite()) {
        return Err(Error::NonFinite {
            params: format!(
                "q={}, a={}, alpha={}, theta={}°",
                params.q, params.a, params.alpha, params.theta
            ),
            tau: PI,
        });
    }
    Ok(MonodromyMatrix { m: u, params })
}

/// Monodromy of the single-variable equation `x″ + (a + 2q cos 2τ) x = 0`.
///
/// Serves as the decoupled-limit oracle: at θ = 0 the coupled system splits
/// into two such equations with `(a_eff, q_eff) = (a, q)` and `(−αa, −q)`.
pub fn monodromy_2x2(a_eff: f64, q_eff: f64, cfg: IntegratorConfig) -> Result<Matrix2<f64>> {
    cfg.validate()?;
    if !a_eff.is_finite() || !q_eff.is_finite() {
        return Err(Error::InvalidParams(format!(
            "non-finite input: a_eff={a_eff}, q_eff={q_eff}"
        )));
    }
    let n = cfg.steps_per_period;
    let h = PI / n as f64;
    let (h2, h6) = (0.5 * h, h / 6.0);

    // Positions and velocities of the two fundamental solutions.
    let mut x = Vector2::new(1.0, 0.0);
    let mut v = Vector2::new(0.0, 1.0);

    for i in 0..n {
        let t2 = 2.0 * (h * i as f64);
        let f0 = -(a_eff + 2.0 * q_eff * t2.cos());
        let fm = -(a_eff + 2.0 * q_eff * (t2 + h).cos());
        let f1 = -(a_eff + 2.0 * q_eff * (t2 + 2.0 * h).cos());

        let k1v = x * f0;
        let k2x = v + k1v * h2;
        let k2v = (x + v * h2) * fm;
        let k3x = v + k2v * h2;
        let k3v = (x + k2x * h2) * fm;
        let k4x = v + k3v * h;
        let k4v = (x + k3x * h) * f1;

        x += (v + (k2x + k3x) * 2.0 + k4x) * h6;
        v += (k1v + (k2v + k3v) * 2.0 + k4v) * h6;
    }

    let u = Matrix2::new(x[0], x[1], v[0], v[1]);
    if !u.iter().all(|e| e.is_finite()) {
        return Err(Error::NonFinite {
            params: format!("a_eff={a_eff}, q_eff={q_eff}"),
            tau: PI,
        });
    }
    Ok(u)
}
