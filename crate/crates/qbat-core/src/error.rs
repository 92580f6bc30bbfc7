//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by construction, validation, and computation routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Operand shapes or subsystem layouts are incompatible.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// A numeric argument is outside its admissible range.
    #[error("invalid value: {0}")]
    InvalidValue(String),
    /// A vector or matrix fails the quantum-state invariants.
    #[error("invalid state: {0}")]
    InvalidState(String),
    /// A measurement fails positivity or completeness.
    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),
    /// The request is well-formed but outside this crate's capabilities.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    /// An optimization run could not produce a usable result.
    #[error("optimization failed: {0}")]
    OptimizationFailed(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
