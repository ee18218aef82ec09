//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised by the numerical and model layers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// A result overflowed the double range (use the log variant instead).
    #[error("overflow in {op} at ({arg1}, {arg2})")]
    Overflow { op: &'static str, arg1: f64, arg2: f64 },

    /// Orthant/CDF machinery asked for a dimension above the supported cap.
    #[error("unsupported dimension {dim} in {op}; supported range is 1..={max}")]
    UnsupportedDimension { op: &'static str, dim: usize, max: usize },

    /// A matrix that must be symmetric positive definite is not.
    #[error("matrix not positive definite in {op}")]
    NotPositiveDefinite { op: &'static str },

    /// Shapes of the supplied arguments do not agree.
    #[error("dimension mismatch in {op}: {detail}")]
    DimensionMismatch { op: &'static str, detail: String },

    /// An iterative scheme failed to converge.
    #[error("{op} failed to converge: {detail}")]
    NoConvergence { op: &'static str, detail: String },

    /// Truncation region carries essentially no probability mass.
    #[error("degenerate truncation: orthant probability below {threshold:e}")]
    DegenerateTruncation { threshold: f64 },

    /// Factor-model dimension constraints are violated.
    #[error("constraint violation: {0}")]
    Constraint(String),

    /// Every mixture density underflowed for at least one observation.
    #[error("degenerate likelihood: all component densities underflowed")]
    DegenerateLikelihood,

    /// A mixture component lost all of its effective observations.
    #[error("component {component} collapsed (effective size {size:.3e})")]
    ComponentCollapse { component: usize, size: f64 },

    /// Every initialization attempt ended in component collapse.
    #[error("fit failed: all {0} initializations collapsed")]
    FitFailure(usize),

    /// Problems reading or interpreting input data.
    #[error("input error: {0}")]
    Input(String),

    /// Problems serializing or deserializing a model file.
    #[error("model io error: {0}")]
    ModelIo(String),
}

pub type Result<T> = std::result::Result<T, Error>;
