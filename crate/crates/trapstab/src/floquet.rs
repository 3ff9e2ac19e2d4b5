//! Floquet multipliers, stability classification, and eigenvalue-collision
//! tracing.
//!
//! The monodromy matrix of the coupled system is real and symplectic, so its
//! four multipliers come in reciprocal and conjugate groups: quadruples
//! `(λ, λ̄, 1/λ, 1/λ̄)` off both the unit circle and the real axis, real
//! pairs `(λ, 1/λ)`, unit-circle pairs `(λ, λ̄)`, and `±1`. Bounded motion
//! requires all four on the unit circle and distinct; instabilities develop
//! only after multipliers collide on the circle and leave it.

use crate::error::{Error, Result};
use crate::integrator::{monodromy, IntegratorConfig, MonodromyMatrix};
use crate::params::TrapParams;
use nalgebra::Matrix4;
use num_complex::Complex64;
use std::fmt;
use std::str::FromStr;

/// Acceptable normalized characteristic-polynomial residual `|p(λ)|/‖m‖⁴`.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Default tolerance on the modulus split of a reciprocal pair for counting
/// it as on the unit circle; several decades above the integrator's
/// symplectic residual at default steps.
pub const TOL_UNIT: f64 = 1e-6;

/// Largest acceptable `|λμ − 1|` over the two reciprocal pairs before a
/// spectrum is rejected as inconsistent with the symplectic structure.
const PAIRING_SLACK: f64 = 1e-3;

/// Default minimum pairwise separation below which a fully stable spectrum
/// is flagged as marginal (possible non-diagonalizable degeneracy).
pub const TOL_DEGENERATE: f64 = 1e-6;

/// The four Floquet multipliers of a monodromy matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSpectrum {
    /// Eigenvalues of the real 4×4 monodromy matrix.
    pub values: [Complex64; 4],
    /// Max over values of `|p(λ)|`, normalized by `‖m‖⁴` (diagnostic).
    pub residual: f64,
}

/// Stability verdict for one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StabilityClass {
    /// Human-readable verdict; consistent with `unit_count`.
    pub label: StabilityLabel,
    /// Number of multipliers on the unit circle: 0, 2, or 4.
    pub unit_count: u8,
}

/// The four possible verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StabilityLabel {
    /// All four multipliers distinct and on the unit circle.
    FullyStable,
    /// One pair on the circle, one pair off: noise excites the growing
    /// subspace, so this is practically unstable.
    PartiallyStable,
    /// No multipliers on the unit circle.
    Unstable,
    /// Four on the circle but some pair (nearly) coincident; linear growth
    /// is possible and the verdict is resolution limited.
    Marginal,
}

impl fmt::Display for StabilityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::FullyStable => "FullyStable",
            Self::PartiallyStable => "PartiallyStable",
            Self::Unstable => "Unstable",
            Self::Marginal => "Marginal",
        })
    }
}

impl FromStr for StabilityLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "FullyStable" => Ok(Self::FullyStable),
            "PartiallyStable" => Ok(Self::PartiallyStable),
            "Unstable" => Ok(Self::Unstable),
            "Marginal" => Ok(Self::Marginal),
            other => Err(format!("unknown stability label {other:?}")),
        }
    }
}

/// One sampled point of an eigenvalue trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub params: TrapParams,
    pub spectrum: EigenSpectrum,
    pub class: StabilityClass,
}

/// A multiplier collision found while sweeping `a` at fixed `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Collision {
    /// Refined value of the swept coordinate at the transition.
    pub a: f64,
    /// Midpoint of the colliding pair, on the unit circle.
    pub location: Complex64,
    /// Whether the colliding pair sits on the real axis (natural resonance)
    /// rather than off it (combined resonance).
    pub on_real_axis: bool,
}

/// Eigenvalue trajectories along a line in parameter space, with the
/// collisions where the stability class changes.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenTrace {
    /// Samples ordered by strictly increasing swept coordinate; multipliers
    /// are matched across steps by nearest-neighbor continuation.
    pub path: Vec<TracePoint>,
    /// Classification transitions, bisection refined.
    pub collisions: Vec<Collision>,
}

/// Coefficients `[b0, b1, b2, b3]` of `p(λ) = λ⁴ + b3λ³ + b2λ² + b1λ + b0`
/// via the trace (Faddeev–LeVerrier) recurrences.
fn char_poly_coeffs(m: &Matrix4<f64>) -> [f64; 4] {
    let m2 = m * m;
    let m3 = m2 * m;
    let m4 = m3 * m;
    let (t1, t2, t3, t4) = (m.trace(), m2.trace(), m3.trace(), m4.trace());
    let b3 = -t1;
    let b2 = -(t2 + b3 * t1) / 2.0;
    let b1 = -(t3 + b3 * t2 + b2 * t1) / 3.0;
    let b0 = -(t4 + b3 * t3 + b2 * t2 + b1 * t1) / 4.0;
    [b0, b1, b2, b3]
}

/// Computes the four Floquet multipliers with a residual gate.
///
/// Eigenvalues come from a real Schur decomposition; the characteristic
/// polynomial evaluated at each of them, normalized by `‖m‖⁴`, must stay
/// below [`RESIDUAL_TOL`] or the call fails with a diagnostic.
pub fn spectrum(m: &MonodromyMatrix) -> Result<EigenSpectrum> {
    if !m.m.iter().all(|e| e.is_finite()) {
        return Err(Error::NonFinite {
            params: format!(
                "q={}, a={}, alpha={}, theta={}°",
                m.params.q, m.params.a, m.params.alpha, m.params.theta
            ),
            tau: std::f64::consts::PI,
        });
    }
    let eigs = m.m.complex_eigenvalues();
    let values = [eigs[0], eigs[1], eigs[2], eigs[3]];

    let [b0, b1, b2, b3] = char_poly_coeffs(&m.m);
    let scale = m.m.norm().powi(4).max(1.0);
    let mut residual = 0.0_f64;
    for lam in values {
        let p = (((lam + b3) * lam + b2) * lam + b1) * lam + b0;
        residual = residual.max(p.norm() / scale);
    }
    if !(residual <= RESIDUAL_TOL) {
        return Err(Error::EigensolverFailure { residual });
    }
    Ok(EigenSpectrum { values, residual })
}

/// Splits the four multipliers into two reciprocal pairs.
///
/// The first pair is `values[0]` with the partner minimizing `|λμ − 1|`;
/// the remaining two form the second. Returns the two index pairs and the
/// larger of the two products' distances from 1 (the pairing defect).
fn reciprocal_pairs(values: &[Complex64; 4]) -> ([usize; 2], [usize; 2], f64) {
    let (mut partner, mut defect) = (1, f64::INFINITY);
    for (j, v) in values.iter().enumerate().skip(1) {
        let d = (values[0] * v - 1.0).norm();
        if d < defect {
            partner = j;
            defect = d;
        }
    }
    let rest: [usize; 2] = match partner {
        1 => [2, 3],
        2 => [1, 3],
        _ => [1, 2],
    };
    let d2 = (values[rest[0]] * values[rest[1]] - 1.0).norm();
    ([0, partner], rest, defect.max(d2))
}

/// How far a reciprocal pair sits from the unit circle: the modulus split
/// `√(|λ|/|μ|) − 1` with `|λ| ≥ |μ|`, which is zero for an on-circle pair
/// regardless of shared roundoff drift.
fn pair_split(lam: Complex64, mu: Complex64) -> f64 {
    let (big, small) = (lam.norm().max(mu.norm()), lam.norm().min(mu.norm()));
    (big / small).sqrt() - 1.0
}

/// Classifies a spectrum by counting unit-circle reciprocal pairs.
///
/// The multipliers are first grouped into two reciprocal pairs; a pair is on
/// the unit circle when its modulus split is at most `tol_unit`, so
/// `unit_count` is always even. Four on the circle gives `FullyStable`
/// unless some two multipliers lie within `tol_degenerate` of each other
/// (`Marginal`); two gives `PartiallyStable`; none gives `Unstable`. A
/// spectrum whose values cannot be paired reciprocally at all is rejected
/// as inconsistent — the monodromy it came from was not symplectic.
pub fn classify(s: &EigenSpectrum, tol_unit: f64, tol_degenerate: f64) -> Result<StabilityClass> {
    let (p1, p2, defect) = reciprocal_pairs(&s.values);
    if !(defect <= PAIRING_SLACK) {
        return Err(Error::InconsistentSpectrum { defect });
    }
    let on = |p: [usize; 2]| pair_split(s.values[p[0]], s.values[p[1]]) <= tol_unit;
    let unit_count = 2 * (on(p1) as u8 + on(p2) as u8);
    let label = match unit_count {
        4 => {
            if min_pairwise_distance(&s.values) <= tol_degenerate {
                StabilityLabel::Marginal
            } else {
                StabilityLabel::FullyStable
            }
        }
        2 => StabilityLabel::PartiallyStable,
        _ => StabilityLabel::Unstable,
    };
    Ok(StabilityClass { label, unit_count })
}

/// [`classify`] with the default tolerances.
pub fn classify_default(s: &EigenSpectrum) -> Result<StabilityClass> {
    classify(s, TOL_UNIT, TOL_DEGENERATE)
}

fn min_pairwise_distance(values: &[Complex64; 4]) -> f64 {
    let mut min = f64::INFINITY;
    for i in 0..4 {
        for j in (i + 1)..4 {
            min = min.min((values[i] - values[j]).norm());
        }
    }
    min
}

/// The pair of indices with the smallest mutual distance.
fn closest_pair(values: &[Complex64; 4]) -> (usize, usize) {
    let (mut best, mut min) = ((0, 1), f64::INFINITY);
    for i in 0..4 {
        for j in (i + 1)..4 {
            let d = (values[i] - values[j]).norm();
            if d < min {
                min = d;
                best = (i, j);
            }
        }
    }
    best
}

/// Reorders `current` to follow `previous` by greedy nearest-neighbor
/// assignment, preserving trajectory continuity across trace steps.
fn match_to_previous(previous: &[Complex64; 4], current: &[Complex64; 4]) -> [Complex64; 4] {
    let mut used = [false; 4];
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for k in 0..4 {
        let mut best = usize::MAX;
        let mut min = f64::INFINITY;
        for (j, cand) in current.iter().enumerate() {
            if !used[j] {
                let d = (previous[k] - cand).norm();
                if d < min {
                    min = d;
                    best = j;
                }
            }
        }
        used[best] = true;
        out[k] = current[best];
    }
    out
}

/// Width to which collision brackets are refined. Much finer than the 1e−6
/// contract so the colliding pair is evaluated essentially at the collision:
/// the off-circle splitting grows like the square root of the distance to
/// the transition, so locating it to 1e−12 keeps the pair within about 1e−5
/// of each other.
const COLLISION_BRACKET: f64 = 1e-12;

/// Samples the multipliers along a line of constant `q` and records every
/// classification transition as a bisection-refined collision.
///
/// `steps ≥ 2` samples are placed uniformly over `a_range`. Between
/// consecutive samples whose `unit_count` differs, the transition is
/// bisected; the colliding pair is the closest pair just on the lower
/// `unit_count` side, where the departed multipliers still nearly coincide.
/// `on_real_axis` is true when both pair members have imaginary parts below
/// 1e−4 in magnitude.
pub fn trace_eigenvalues(
    alpha: f64,
    theta: f64,
    q_fixed: f64,
    a_range: (f64, f64),
    steps: usize,
    cfg: IntegratorConfig,
) -> Result<EigenTrace> {
    if steps < 2 {
        return Err(Error::InvalidParams(format!(
            "trace needs at least 2 samples, got {steps}"
        )));
    }
    let (a_lo, a_hi) = a_range;
    if !(a_lo.is_finite() && a_hi.is_finite() && a_lo < a_hi) {
        return Err(Error::InvalidParams(format!(
            "invalid a range: {a_lo}..{a_hi}"
        )));
    }

    let eval = |a: f64| -> Result<(TrapParams, EigenSpectrum, StabilityClass)> {
        let params = TrapParams::new(q_fixed, a, alpha, theta)?;
        let s = spectrum(&monodromy(params, cfg)?)?;
        let class = classify_default(&s)?;
        Ok((params, s, class))
    };

    let da = (a_hi - a_lo) / (steps - 1) as f64;
    let mut path: Vec<TracePoint> = Vec::with_capacity(steps);
    for i in 0..steps {
        let a = a_lo + da * i as f64;
        let (params, mut s, class) = eval(a)?;
        if let Some(prev) = path.last() {
            s.values = match_to_previous(&prev.spectrum.values, &s.values);
        }
        path.push(TracePoint {
            params,
            spectrum: s,
            class,
        });
    }

    let mut collisions = Vec::new();
    for w in 0..steps - 1 {
        let uc_lo = path[w].class.unit_count;
        let uc_hi = path[w + 1].class.unit_count;
        if uc_lo == uc_hi {
            continue;
        }
        let mut lo = path[w].params.a;
        let mut hi = path[w + 1].params.a;
        for _ in 0..80 {
            if hi - lo <= COLLISION_BRACKET {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let (_, _, c) = eval(mid)?;
            if c.unit_count == uc_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // Evaluate the pair on the side with fewer multipliers on the
        // circle: right past the collision the departed pair still nearly
        // coincides, and its imaginary parts are O(1) for a combined
        // resonance but zero for a natural one.
        let side = if uc_lo < uc_hi { lo } else { hi };
        let (_, s, _) = eval(side)?;
        let (i, j) = closest_pair(&s.values);
        let (lam, mu) = (s.values[i], s.values[j]);
        collisions.push(Collision {
            a: 0.5 * (lo + hi),
            location: 0.5 * (lam + mu),
            on_real_axis: lam.im.abs() <= 1e-4 && mu.im.abs() <= 1e-4,
        });
    }

    Ok(EigenTrace { path, collisions })
}
