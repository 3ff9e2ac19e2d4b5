//! Classified raster of the (q, a) plane at fixed (α, θ): the generalized
//! stability diagram engine.
//!
//! Cells are independent, so the sweep is data parallel. With the `parallel`
//! feature (default) cells are evaluated on the rayon pool; the sequential
//! engine remains available as [`sweep_grid_serial`] and produces identical
//! output, since every cell is a pure function of its center coordinates.

use crate::error::{Error, Result};
use crate::floquet::{classify_default, spectrum, StabilityClass, StabilityLabel};
use crate::integrator::{monodromy, IntegratorConfig};
use crate::params::TrapParams;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Rectangular (q, a) window and its resolution in cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub q_min: f64,
    pub q_max: f64,
    pub a_min: f64,
    pub a_max: f64,
    /// Cell counts along q and a; at least 2 each.
    pub nq: usize,
    pub na: usize,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = self.q_min.is_finite()
            && self.q_max.is_finite()
            && self.a_min.is_finite()
            && self.a_max.is_finite()
            && self.q_min < self.q_max
            && self.a_min < self.a_max;
        if !ok {
            return Err(Error::InvalidGrid(format!(
                "need finite q_min < q_max and a_min < a_max, got q {}..{}, a {}..{}",
                self.q_min, self.q_max, self.a_min, self.a_max
            )));
        }
        if self.nq < 2 || self.na < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 cells per axis, got {}x{}",
                self.nq, self.na
            )));
        }
        Ok(())
    }

    /// Cell width along q.
    pub fn dq(&self) -> f64 {
        (self.q_max - self.q_min) / self.nq as f64
    }

    /// Cell width along a.
    pub fn da(&self) -> f64 {
        (self.a_max - self.a_min) / self.na as f64
    }

    /// q at the center of cell column `i`.
    pub fn q_center(&self, i: usize) -> f64 {
        self.q_min + (i as f64 + 0.5) * self.dq()
    }

    /// a at the center of cell row `j`.
    pub fn a_center(&self, j: usize) -> f64 {
        self.a_min + (j as f64 + 0.5) * self.da()
    }

    /// Row-major index of cell `(i, j)`: `i * na + j`.
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.na + j
    }
}

/// One raster cell: a classification, or a mark that evaluation failed.
///
/// Failures are recorded instead of aborting so a single pathological cell
/// cannot destroy a long sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridCell {
    Classified(StabilityClass),
    Failed,
}

impl GridCell {
    pub fn class(&self) -> Option<StabilityClass> {
        match self {
            Self::Classified(c) => Some(*c),
            Self::Failed => None,
        }
    }
}

/// Stability classifications over a (q, a) window at fixed (α, θ).
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityGrid {
    pub spec: GridSpec,
    pub alpha: f64,
    /// Normalized angle in degrees, `[0, 90]`.
    pub theta: f64,
    /// Row-major cells, `cells[i * na + j]` for column i (q) and row j (a).
    pub cells: Vec<GridCell>,
    /// Integrator configuration every cell was evaluated with.
    pub cfg: IntegratorConfig,
}

impl StabilityGrid {
    pub fn cell(&self, i: usize, j: usize) -> &GridCell {
        &self.cells[self.spec.index(i, j)]
    }

    /// Number of cells whose evaluation failed.
    pub fn failed_count(&self) -> usize {
        self.cells
            .iter()
            .filter(|c| matches!(c, GridCell::Failed))
            .count()
    }

    /// Number of cells carrying the given label.
    pub fn count_label(&self, label: StabilityLabel) -> usize {
        self.cells
            .iter()
            .filter(|c| matches!(c.class(), Some(s) if s.label == label))
            .count()
    }
}

fn eval_cell(alpha: f64, theta: f64, spec: &GridSpec, cfg: IntegratorConfig, idx: usize) -> GridCell {
    let (i, j) = (idx / spec.na, idx % spec.na);
    let outcome = TrapParams::new(spec.q_center(i), spec.a_center(j), alpha, theta)
        .and_then(|p| monodromy(p, cfg))
        .and_then(|u| spectrum(&u))
        .and_then(|s| classify_default(&s));
    match outcome {
        Ok(class) => GridCell::Classified(class),
        Err(_) => GridCell::Failed,
    }
}

fn validated(alpha: f64, theta: f64, spec: &GridSpec, cfg: IntegratorConfig) -> Result<f64> {
    spec.validate()?;
    cfg.validate()?;
    // Validates alpha and theta and yields the normalized angle.
    Ok(TrapParams::new(0.0, 0.0, alpha, theta)?.theta)
}

/// Sweeps the grid, evaluating every cell center.
///
/// Output is deterministic for fixed inputs regardless of execution order or
/// thread count, and identical to [`sweep_grid_serial`].
pub fn sweep_grid(
    alpha: f64,
    theta: f64,
    spec: GridSpec,
    cfg: IntegratorConfig,
) -> Result<StabilityGrid> {
    let theta_norm = validated(alpha, theta, &spec, cfg)?;
    let n = spec.nq * spec.na;

    #[cfg(feature = "parallel")]
    let cells: Vec<GridCell> = (0..n)
        .into_par_iter()
        .map(|idx| eval_cell(alpha, theta_norm, &spec, cfg, idx))
        .collect();

    #[cfg(not(feature = "parallel"))]
    let cells: Vec<GridCell> = (0..n)
        .map(|idx| eval_cell(alpha, theta_norm, &spec, cfg, idx))
        .collect();

    Ok(StabilityGrid {
        spec,
        alpha,
        theta: theta_norm,
        cells,
        cfg,
    })
}

/// Sequential sweep; same contract and output as [`sweep_grid`].
pub fn sweep_grid_serial(
    alpha: f64,
    theta: f64,
    spec: GridSpec,
    cfg: IntegratorConfig,
) -> Result<StabilityGrid> {
    let theta_norm = validated(alpha, theta, &spec, cfg)?;
    let n = spec.nq * spec.na;
    let cells: Vec<GridCell> = (0..n)
        .map(|idx| eval_cell(alpha, theta_norm, &spec, cfg, idx))
        .collect();
    Ok(StabilityGrid {
        spec,
        alpha,
        theta: theta_norm,
        cells,
        cfg,
    })
}
