//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum WaveError {
    /// Input outside the documented domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two fields or states do not live on the same grid.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Negative-order operator applied to a field with nonzero mean.
    #[error("nonzero mean: {0}")]
    MeanNonzero(String),

    /// Multiplier symbol is not finite at a lattice point that carries mass.
    #[error("singular multiplier: {0}")]
    Singularity(String),

    /// Frequency content would alias under the requested rescaling.
    #[error("aliasing: {0}")]
    Aliasing(String),

    /// Requested time exceeds the periodic wrap-around horizon.
    #[error("wrap-around horizon exceeded: {0}")]
    Horizon(String),

    /// Picard sweep failed to reach the residual tolerance.
    #[error("contraction failure: residual {residual:.3e} after {iterations} sweeps")]
    ContractionFailure { iterations: usize, residual: f64 },

    /// Explicit time step exceeds the stability bound of the reference integrator.
    #[error("CFL violation: {0}")]
    CflViolation(String),

    /// Malformed trajectory or missing snapshot data.
    #[error("structural error: {0}")]
    Structural(String),

    /// Diagnostic undefined on the zero state.
    #[error("undefined on zero state: {0}")]
    ZeroState(String),

    /// Fixed-point iteration diverged (hypothesis violated).
    #[error("no fixed point: {0}")]
    NoFixedPoint(String),

    /// Parameters outside the regime where the construction applies.
    #[error("inapplicable: {0}")]
    Inapplicable(String),

    /// Requested data not available (e.g. truncated trajectory).
    #[error("unavailable: {0}")]
    Unavailable(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, WaveError>;
