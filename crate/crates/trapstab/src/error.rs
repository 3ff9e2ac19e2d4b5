//! Error type shared across the library.

use thiserror::Error;

/// Errors from parameter validation, integration, and spectral analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Inputs outside the supported parameter domain.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Integration produced a non-finite matrix entry (extreme |q| or |a|).
    #[error("non-finite state while integrating {params} at tau={tau}")]
    NonFinite { params: String, tau: f64 },

    /// The eigensolver could not deliver a spectrum with an acceptable
    /// characteristic-polynomial residual.
    #[error("eigensolver failure: normalized characteristic residual {residual:e}")]
    EigensolverFailure { residual: f64 },

    /// The four multipliers cannot be split into two reciprocal pairs, which
    /// the symplectic structure rules out; signals integrator or solver
    /// breakdown.
    #[error("inconsistent spectrum: reciprocal pairing defect {defect:e}")]
    InconsistentSpectrum { defect: f64 },

    /// A grid or sampling specification violates its invariants.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
