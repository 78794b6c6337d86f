//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Operator/state dimensions do not match.
    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// An index lies outside the truncated Fock space.
    #[error("index out of range: {0}")]
    OutOfRange(String),

    /// A state failed a validity invariant (norm, hermiticity, trace, positivity).
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// A matrix expected to be symmetric/Hermitian is not.
    #[error("matrix is not symmetric within tolerance: max deviation {0:.3e}")]
    NotSymmetric(f64),

    /// A clamped quantity overshot its admissible range by more than rounding
    /// can explain; this indicates a logic bug upstream, not noise.
    #[error("radicand overshoot in {context}: value {value:.6e} outside [0,1] by more than {slack:.1e}")]
    RadicandOvershoot {
        context: &'static str,
        value: f64,
        slack: f64,
    },

    /// Invalid parameter for a constructor or algorithm.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Maximum-likelihood reconstruction produced a non-positive iterate.
    #[error("reconstruction failed to produce a positive semidefinite state: {0}")]
    ReconstructionFailure(String),

    /// Empty dataset where samples are required.
    #[error("empty dataset: {0}")]
    EmptyDataset(&'static str),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}
