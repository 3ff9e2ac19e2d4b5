//! Truncated infinite-determinant (Hill) method.
//!
//! Substituting the two-variable Floquet ansatz `u(τ) = e^{iντ} Σ uₙ e^{2inτ}`
//! into the coupled equations turns them into a block-tridiagonal linear
//! system: block row n has diagonal `Dₙ = diag(−(ν+2n)² + a, −(ν+2n)² − αa)`
//! and couples to rows n±1 through the RF matrix `Q`. Natural-resonance
//! stability boundaries are parameter sets where the (truncated) determinant
//! vanishes for ν = 0 or ν = 1, i.e. growth factor `e^{iνπ} = ±1`.
//!
//! Rows are normalized by their diagonal entry to tame the determinant's
//! magnitude; rows whose diagonal nearly vanishes stay unnormalized and are
//! flagged. The determinant of the scaled matrix is evaluated by a
//! block-tridiagonal Schur-complement sweep in O(N) 2×2 operations, with a
//! dense LU fallback for the (never observed) singular intermediate case.

use crate::error::{Error, Result};
use crate::params::{build_matrices, TrapParams};
use nalgebra::{DMatrix, Matrix2};
use std::fmt;
use std::str::FromStr;

/// Diagonal entries within this distance of zero leave their row
/// unnormalized (resonant denominators, e.g. ν=1, n=0 at a=1).
const EPS_DIAG: f64 = 1e-12;

/// Bisection is refined until the bracket is at most this wide.
const ROOT_TOL: f64 = 1e-8;

/// Truncated block coefficient matrix of the two-variable Floquet ansatz.
///
/// Fourier indices run over `n = −order..=order`, so the matrix dimension is
/// `2(2·order + 1)`. Storage is implicit: blocks are generated on demand,
/// which is all the O(N) determinant sweep needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HillMatrix {
    /// Characteristic exponent ν ∈ {0, 1} (natural resonances).
    pub nu: u8,
    /// Truncation order N ≥ 3.
    pub order: usize,
    /// Operating point supplying a, α, and the off-diagonal block.
    pub params: TrapParams,
}

impl HillMatrix {
    pub fn new(nu: u8, params: TrapParams, order: usize) -> Result<Self> {
        if nu > 1 {
            return Err(Error::InvalidParams(format!(
                "nu must be 0 or 1, got {nu}"
            )));
        }
        if order < 3 {
            return Err(Error::InvalidParams(format!(
                "truncation order must be at least 3, got {order}"
            )));
        }
        // Revalidate in case the params were built by hand.
        let params = TrapParams::new(params.q, params.a, params.alpha, params.theta)?;
        Ok(Self { nu, order, params })
    }

    /// Matrix dimension `2(2N + 1)`.
    pub fn dimension(&self) -> usize {
        2 * (2 * self.order + 1)
    }

    /// Diagonal entries `(−(ν+2n)² + a, −(ν+2n)² − αa)` of block row n.
    pub fn diagonal_entries(&self, n: i64) -> (f64, f64) {
        let w = self.nu as f64 + 2.0 * n as f64;
        let w2 = w * w;
        (-w2 + self.params.a, -w2 - self.params.alpha * self.params.a)
    }

    /// The constant off-diagonal block: the RF matrix `Q`.
    pub fn off_diagonal_block(&self) -> Matrix2<f64> {
        // Params were validated in `new`.
        build_matrices(self.params).expect("validated params").q_mat
    }

    /// Materializes the unnormalized truncated matrix (tests and oracles;
    /// the determinant sweep never builds this).
    pub fn assemble_dense(&self) -> DMatrix<f64> {
        let nblocks = 2 * self.order + 1;
        let dim = self.dimension();
        let w = self.off_diagonal_block();
        let mut m = DMatrix::zeros(dim, dim);
        for b in 0..nblocks {
            let n = b as i64 - self.order as i64;
            let (dx, dy) = self.diagonal_entries(n);
            m[(2 * b, 2 * b)] = dx;
            m[(2 * b + 1, 2 * b + 1)] = dy;
            if b + 1 < nblocks {
                for r in 0..2 {
                    for c in 0..2 {
                        m[(2 * b + r, 2 * (b + 1) + c)] = w[(r, c)];
                        m[(2 * (b + 1) + r, 2 * b + c)] = w[(r, c)];
                    }
                }
            }
        }
        m
    }
}

/// Normalized truncated Hill determinant and how it was regularized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HillDet {
    /// Determinant of the row-normalized truncated matrix.
    pub value: f64,
    /// Rows left unnormalized because their diagonal entry was within
    /// [`EPS_DIAG`] of zero.
    pub unnormalized_rows: usize,
}

/// Scales one scalar row by its diagonal entry: returns the scaled diagonal
/// (exactly 1 when normalized) and the scaled off-block row. Near-resonant
/// rows stay unnormalized and are flagged.
fn scale_row(d: f64, w_row: (f64, f64), flagged: &mut usize) -> (f64, (f64, f64)) {
    if d.abs() <= EPS_DIAG {
        *flagged += 1;
        (d, w_row)
    } else {
        (1.0, (w_row.0 / d, w_row.1 / d))
    }
}

fn inv2(m: &Matrix2<f64>) -> Option<Matrix2<f64>> {
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    Some(Matrix2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]) / det)
}

/// Evaluates the normalized truncated Hill determinant.
///
/// Each scalar row is divided by its diagonal entry (so the q = 0 matrix is
/// exactly the identity and the determinant 1), then the block-tridiagonal
/// determinant is accumulated through the Schur-complement recursion
/// `Sₙ = Ãₙ − W̃ₙ S₋₁⁻¹ W̃ₙ₋₁`, `det = Π det Sₙ`.
pub fn hill_det(nu: u8, params: TrapParams, order: usize) -> Result<HillDet> {
    let hm = HillMatrix::new(nu, params, order)?;
    let w = hm.off_diagonal_block();
    let n_lo = -(hm.order as i64);
    let n_hi = hm.order as i64;

    let mut flagged = 0usize;
    let scaled_diag = |n: i64, flagged: &mut usize| -> (Matrix2<f64>, Matrix2<f64>) {
        let (dx, dy) = hm.diagonal_entries(n);
        let (ax, wx) = scale_row(dx, (w[(0, 0)], w[(0, 1)]), flagged);
        let (ay, wy) = scale_row(dy, (w[(1, 0)], w[(1, 1)]), flagged);
        let diag = Matrix2::new(ax, 0.0, 0.0, ay);
        let scaled_w = Matrix2::new(wx.0, wx.1, wy.0, wy.1);
        (diag, scaled_w)
    };

    let (mut prev, mut prev_w) = scaled_diag(n_lo, &mut flagged);
    let mut det = prev.determinant();
    for n in (n_lo + 1)..=n_hi {
        let (diag, w_n) = scaled_diag(n, &mut flagged);
        let Some(prev_inv) = inv2(&prev) else {
            // Singular Schur complement: fall back to a dense LU of the
            // whole normalized matrix.
            return Ok(HillDet {
                value: dense_normalized_det(&hm),
                unnormalized_rows: flagged,
            });
        };
        let s = diag - w_n * prev_inv * prev_w;
        det *= s.determinant();
        prev = s;
        prev_w = w_n;
    }
    Ok(HillDet {
        value: det,
        unnormalized_rows: flagged,
    })
}

/// Dense-LU determinant of the row-normalized matrix (fallback and oracle).
fn dense_normalized_det(hm: &HillMatrix) -> f64 {
    let mut m = hm.assemble_dense();
    for b in 0..(2 * hm.order + 1) {
        let n = b as i64 - hm.order as i64;
        let (dx, dy) = hm.diagonal_entries(n);
        for (row, d) in [(2 * b, dx), (2 * b + 1, dy)] {
            if d.abs() > EPS_DIAG {
                for c in 0..m.ncols() {
                    m[(row, c)] /= d;
                }
            }
        }
    }
    m.determinant()
}

/// Normalized truncated Hill determinant of the single-variable equation
/// `x″ + (a + 2q cos 2τ) x = 0`: diagonal `−(ν+2n)² + a`, neighbors `q`.
///
/// Used as the decoupled-limit oracle: at θ = 0 the two-variable determinant
/// factors into the x branch at `(a, q)` and the y branch at `(−αa, −q)`.
pub fn hill_det_single(nu: u8, a_eff: f64, q_eff: f64, order: usize) -> Result<HillDet> {
    if nu > 1 {
        return Err(Error::InvalidParams(format!(
            "nu must be 0 or 1, got {nu}"
        )));
    }
    if order < 3 {
        return Err(Error::InvalidParams(format!(
            "truncation order must be at least 3, got {order}"
        )));
    }
    if !a_eff.is_finite() || !q_eff.is_finite() {
        return Err(Error::InvalidParams(format!(
            "non-finite input: a_eff={a_eff}, q_eff={q_eff}"
        )));
    }

    let mut flagged = 0usize;
    let mut scaled = |n: i64| -> (f64, f64) {
        let w = nu as f64 + 2.0 * n as f64;
        let d = -w * w + a_eff;
        let r = if d.abs() <= EPS_DIAG {
            flagged += 1;
            1.0
        } else {
            d
        };
        (d / r, q_eff / r)
    };

    let n_lo = -(order as i64);
    let (mut prev, mut prev_w) = scaled(n_lo);
    let mut det = prev;
    for n in (n_lo + 1)..=(order as i64) {
        let (diag, w_n) = scaled(n);
        if prev == 0.0 || !prev.is_finite() {
            return Err(Error::InvalidParams(format!(
                "singular elimination pivot in single-variable determinant at n={n}"
            )));
        }
        let s = diag - w_n * prev_w / prev;
        det *= s;
        prev = s;
        prev_w = w_n;
    }
    Ok(HillDet {
        value: det,
        unnormalized_rows: flagged,
    })
}

/// How a boundary curve was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveMethod {
    /// Root of the truncated Hill determinant.
    Hill,
    /// Closed-form multi-scale boundary of the coupled system.
    MultiScale,
    /// Closed-form multi-scale boundary of the decoupled systems.
    DecoupledMultiScale,
}

impl fmt::Display for CurveMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Hill => "Hill",
            Self::MultiScale => "MultiScale",
            Self::DecoupledMultiScale => "DecoupledMultiScale",
        })
    }
}

impl FromStr for CurveMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "Hill" => Ok(Self::Hill),
            "MultiScale" => Ok(Self::MultiScale),
            "DecoupledMultiScale" => Ok(Self::DecoupledMultiScale),
            other => Err(format!("unknown curve method {other:?}")),
        }
    }
}

/// A labeled stability-boundary polyline in the (q, a) plane.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    pub label: String,
    pub method: CurveMethod,
    /// `(q, a)` pairs, strictly increasing in q.
    pub points: Vec<(f64, f64)>,
}

impl BoundaryCurve {
    /// Checks the strictly-increasing-in-q invariant.
    pub fn validate(&self) -> Result<()> {
        for w in self.points.windows(2) {
            if !(w[0].0 < w[1].0) {
                return Err(Error::InvalidGrid(format!(
                    "curve {:?} is not strictly increasing in q near q={}",
                    self.label, w[0].0
                )));
            }
        }
        Ok(())
    }
}

/// A curve that could not be continued across the whole q range.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveWarning {
    pub label: String,
    /// Last q at which the curve still had a root.
    pub q: f64,
    pub message: String,
}

/// Output of [`hill_boundary`]: curves plus truncation warnings.
#[derive(Debug, Clone, PartialEq)]
pub struct HillBoundaries {
    pub curves: Vec<BoundaryCurve>,
    pub warnings: Vec<CurveWarning>,
}

/// How far scan endpoints are pulled off a diagonal resonance so they sample
/// the diverging normalized determinant instead of the fallback value at the
/// resonance itself.
const POLE_OFFSET: f64 = 1e-7;

/// Values of a in `[lo, hi]` where some diagonal entry of the truncated
/// matrix vanishes: `a = (ν+2n)²` (x rows) or `a = −(ν+2n)²/α` (y rows).
/// Row normalization turns these into poles of the determinant.
fn diagonal_poles(nu: u8, alpha: f64, order: usize, bracket: (f64, f64)) -> Vec<f64> {
    let (lo, hi) = bracket;
    let mut poles = Vec::new();
    for n in -(order as i64)..=(order as i64) {
        let w = f64::from(nu) + 2.0 * n as f64;
        let w2 = w * w;
        for p in [w2, -w2 / alpha] {
            if (lo..=hi).contains(&p) {
                poles.push(p);
            }
        }
    }
    poles.sort_by(f64::total_cmp);
    poles.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    poles
}

/// All sign-change roots of `a ↦ hill_det(...)` in `bracket`, each refined
/// by bisection to a bracket width of [`ROOT_TOL`].
///
/// The normalized determinant has poles at the diagonal resonances
/// ([`diagonal_poles`]), so the bracket is scanned per pole-free segment in
/// subintervals no wider than 0.005, with segment endpoints pulled
/// [`POLE_OFFSET`] off adjacent poles; otherwise a root and a pole sharing
/// one subinterval cancel each other's sign change (the a = 0 wedge
/// boundaries at small q sit within 0.005 of the ν = 0 resonance). A refined
/// candidate is accepted only if the determinant's magnitude at the
/// candidate does not exceed its magnitude at the enclosing scan edges,
/// which rejects the diverging crossings at the poles themselves. A
/// determinant that is exactly zero *at* a resonance (possible through the
/// unnormalized-row fallback, e.g. the q → 0 tongue intercepts) is a genuine
/// boundary point and is kept.
fn roots_in_bracket(
    nu: u8,
    q: f64,
    alpha: f64,
    theta: f64,
    order: usize,
    bracket: (f64, f64),
) -> Result<Vec<f64>> {
    let (lo, hi) = bracket;
    let f = |a: f64| -> Result<f64> {
        let p = TrapParams::new(q, a, alpha, theta)?;
        Ok(hill_det(nu, p, order)?.value)
    };
    let poles = diagonal_poles(nu, alpha, order, bracket);
    let target_step = ((hi - lo) / 256.0).min(0.005);

    let mut roots = Vec::new();
    for &p in &poles {
        if f(p)? == 0.0 {
            roots.push(p);
        }
    }

    let mut cuts = poles.clone();
    cuts.insert(0, lo);
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let is_pole = |x: f64| poles.iter().any(|&p| p == x);

    for w in cuts.windows(2) {
        let seg_lo = if is_pole(w[0]) { w[0] + POLE_OFFSET } else { w[0] };
        let seg_hi = if is_pole(w[1]) { w[1] - POLE_OFFSET } else { w[1] };
        if !(seg_lo < seg_hi) {
            continue;
        }
        let subdivisions = (((seg_hi - seg_lo) / target_step).ceil() as usize).max(4);
        let step = (seg_hi - seg_lo) / subdivisions as f64;

        let mut x0 = seg_lo;
        let mut f0 = f(x0)?;
        for k in 1..=subdivisions {
            let x1 = if k == subdivisions {
                seg_hi
            } else {
                seg_lo + step * k as f64
            };
            let f1 = f(x1)?;
            if f0 == 0.0 {
                roots.push(x0);
            } else if f0 * f1 < 0.0 {
                let (mut rl, mut rh, mut fl) = (x0, x1, f0);
                while rh - rl > ROOT_TOL {
                    let mid = 0.5 * (rl + rh);
                    let fm = f(mid)?;
                    if fm == 0.0 {
                        rl = mid;
                        rh = mid;
                        break;
                    }
                    if fl * fm < 0.0 {
                        rh = mid;
                    } else {
                        rl = mid;
                        fl = fm;
                    }
                }
                let root = 0.5 * (rl + rh);
                let f_root = f(root)?.abs();
                if f_root <= f0.abs().max(f1.abs()) {
                    roots.push(root);
                }
            }
            x0 = x1;
            f0 = f1;
        }
        if f0 == 0.0 {
            roots.push(x0);
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-7);
    Ok(roots)
}

/// Traces natural-resonance boundary curves of the truncated determinant.
///
/// For every q sample all roots of `a ↦ hill_det` inside `a_bracket` are
/// located, then strung into curves by nearest-root continuation: a root
/// continues the curve whose last ordinate is closest, unless the jump
/// exceeds 5× the median inter-root spacing at that q, in which case a new
/// curve is born. Curves that lose their root before the final q sample are
/// truncated and reported in the warnings — never extrapolated.
pub fn hill_boundary(
    nu: u8,
    alpha: f64,
    theta: f64,
    q_samples: &[f64],
    order: usize,
    a_bracket: (f64, f64),
) -> Result<HillBoundaries> {
    if q_samples.is_empty() {
        return Err(Error::InvalidParams("no q samples given".into()));
    }
    let (lo, hi) = a_bracket;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidParams(format!(
            "invalid a bracket: {lo}..{hi}"
        )));
    }
    let mut qs: Vec<f64> = q_samples.to_vec();
    for q in &qs {
        if !q.is_finite() {
            return Err(Error::InvalidParams(format!("non-finite q sample {q}")));
        }
    }
    qs.sort_by(f64::total_cmp);
    qs.dedup();

    struct Active {
        idx: usize,
        label: String,
        points: Vec<(f64, f64)>,
    }

    let mut active: Vec<Active> = Vec::new();
    let mut done: Vec<Active> = Vec::new();
    let mut warnings: Vec<CurveWarning> = Vec::new();
    let mut born = 0usize;

    for &q in &qs {
        let roots = roots_in_bracket(nu, q, alpha, theta, order, a_bracket)?;

        // Jump threshold: 5× the median spacing between adjacent roots.
        let threshold = if roots.len() >= 2 {
            let mut gaps: Vec<f64> = roots.windows(2).map(|w| w[1] - w[0]).collect();
            gaps.sort_by(f64::total_cmp);
            5.0 * gaps[gaps.len() / 2]
        } else {
            f64::INFINITY
        };

        // Greedy assignment by ascending curve-to-root distance.
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (ci, curve) in active.iter().enumerate() {
            let last_a = curve.points.last().expect("active curve non-empty").1;
            for (ri, &r) in roots.iter().enumerate() {
                pairs.push(((r - last_a).abs(), ci, ri));
            }
        }
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut curve_taken = vec![false; active.len()];
        let mut root_taken = vec![false; roots.len()];
        let mut assignment = vec![usize::MAX; active.len()];
        for (d, ci, ri) in pairs {
            if !curve_taken[ci] && !root_taken[ri] && d <= threshold {
                curve_taken[ci] = true;
                root_taken[ri] = true;
                assignment[ci] = ri;
            }
        }

        // Extend matched curves; retire unmatched ones as truncated, since
        // their root left the bracket (or vanished) before the last sample.
        let mut still_active = Vec::new();
        for (ci, mut curve) in active.drain(..).enumerate() {
            if assignment[ci] != usize::MAX {
                curve.points.push((q, roots[assignment[ci]]));
                still_active.push(curve);
            } else {
                let (last_q, last_a) = *curve.points.last().expect("non-empty");
                warnings.push(CurveWarning {
                    label: curve.label.clone(),
                    q: last_q,
                    message: format!(
                        "curve {} truncated: no continuing root in bracket after \
                         (q={last_q}, a={last_a})",
                        curve.label
                    ),
                });
                done.push(curve);
            }
        }
        active = still_active;

        // Unclaimed roots start new curves.
        for (ri, &r) in roots.iter().enumerate() {
            if !root_taken[ri] {
                active.push(Active {
                    idx: born,
                    label: format!("hill nu={nu} branch {born}"),
                    points: vec![(q, r)],
                });
                born += 1;
            }
        }
    }
    done.append(&mut active);
    done.sort_by_key(|c| c.idx);

    let curves = done
        .into_iter()
        .map(|c| BoundaryCurve {
            label: c.label,
            method: CurveMethod::Hill,
            points: c.points,
        })
        .collect();
    Ok(HillBoundaries { curves, warnings })
}
