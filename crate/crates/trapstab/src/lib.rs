//! Stability analysis for the coupled two-variable Mathieu system that
//! governs radial ion motion in asymmetric surface traps.
//!
//! The system in scaled time τ,
//!
//! ```text
//! x″ + a x + 2q (x cos 2θ + y sin 2θ) cos 2τ = 0
//! y″ − αa y + 2q (x sin 2θ − y cos 2θ) cos 2τ = 0
//! ```
//!
//! is linear with period π, so its long-time behavior is decided by the four
//! Floquet multipliers of the monodromy matrix. This crate computes
//! stability diagrams in the (q, a) plane three independent ways and lets
//! them cross-check each other:
//!
//! - [`integrator`] + [`floquet`]: direct monodromy integration, multiplier
//!   classification, and collision tracing;
//! - [`sweep`]: the data-parallel raster engine built on the above;
//! - [`hill`]: natural-resonance boundary curves as roots of the truncated
//!   infinite (Hill) determinant;
//! - [`multiscale`]: closed-form small-q boundary approximations.
//!
//! # Example
//!
//! ```
//! use trapstab::{classify_default, monodromy, spectrum, IntegratorConfig, TrapParams};
//!
//! let params = TrapParams::new(0.3, 0.05, 0.5, 0.0)?;
//! let cfg = IntegratorConfig::default();
//! let class = classify_default(&spectrum(&monodromy(params, cfg)?)?)?;
//! assert_eq!(class.label, trapstab::StabilityLabel::FullyStable);
//! # Ok::<(), trapstab::Error>(())
//! ```

pub mod error;
pub mod floquet;
pub mod hill;
pub mod integrator;
pub mod multiscale;
pub mod params;
pub mod sweep;

pub use error::{Error, Result};
pub use floquet::{
    classify, classify_default, spectrum, trace_eigenvalues, Collision, EigenSpectrum, EigenTrace,
    StabilityClass, StabilityLabel, TracePoint,
};
pub use hill::{
    hill_boundary, hill_det, hill_det_single, BoundaryCurve, CurveMethod, CurveWarning,
    HillBoundaries, HillDet, HillMatrix,
};
pub use integrator::{
    monodromy, monodromy_2x2, symplectic_form, IntegratorConfig, Method, MonodromyMatrix,
};
pub use multiscale::{coupled_boundaries, decoupled_boundaries, MultiscaleCoeffs};
pub use params::{build_matrices, rhs, CoefficientMatrices, StateVector, TrapParams};
pub use sweep::{sweep_grid, sweep_grid_serial, GridCell, GridSpec, StabilityGrid};
