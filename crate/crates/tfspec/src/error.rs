//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    /// Gamma function evaluated at a pole (zero or a negative integer).
    #[error("gamma function pole at x = {0}")]
    GammaPole(f64),

    /// A value exceeded the representable range of f64.
    #[error("overflow in {context} (argument {argument})")]
    Overflow { context: &'static str, argument: f64 },

    /// A parameter lies outside the admissible domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Requested quadrature size is outside the supported range.
    #[error("quadrature size {n} outside supported range 1..={max}")]
    RuleSize { n: usize, max: usize },

    /// A Jacobi-type weight exponent must be greater than -1.
    #[error("weight exponent {value} must be > -1 ({which})")]
    WeightExponent { which: &'static str, value: f64 },

    /// A weighted Jacobi term does not match the exponent/parameter pattern
    /// required by the operator identity.
    #[error("operand does not match the operator identity pattern: {0}")]
    PatternMismatch(String),

    /// Declared endpoint singularity is non-integrable.
    #[error("non-integrable singularity: exponent {exponent} at {location}")]
    Singularity { exponent: f64, location: f64 },

    /// A function evaluation returned a non-finite value.
    #[error("non-finite function value {value} at x = {x}")]
    NonFiniteValue { x: f64, value: f64 },

    /// Linear system could not be factorized.
    #[error("singular matrix in {context} (condition estimate {condition:.3e})")]
    SingularMatrix { context: &'static str, condition: f64 },

    /// Rate fitting needs at least two rows with positive errors.
    #[error("degenerate convergence data: {0}")]
    DegenerateFit(String),

    /// A convergence case was driven with incompatible parameters.
    #[error("case error: {0}")]
    Case(String),

    /// I/O failure, annotated with the path involved.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
