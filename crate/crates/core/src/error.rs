use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error in {func}: {msg}")]
    Domain { func: &'static str, msg: String },

    #[error("overflow in {func}: {msg}")]
    Overflow { func: &'static str, msg: String },

    #[error("{func} did not converge after {iterations} iterations (achieved tolerance {achieved:e})")]
    NonConvergence {
        func: &'static str,
        iterations: usize,
        achieved: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{0} has no spectral density in dimension {1}")]
    NoSpectralDensity(&'static str, usize),

    #[error("{family} is not twice differentiable at the origin")]
    NotDifferentiable { family: String },

    #[error("model is not certified as valid: {0}")]
    NotCertified(String),

    #[error("factorization failed after jitter {jitter:e} (condition estimate {condition:e})")]
    Factorization { jitter: f64, condition: f64 },

    #[error("nonpositive model variogram {gamma:e} for pair ({i}, {j})")]
    DegenerateVariogram { i: usize, j: usize, gamma: f64 },

    #[error("rank deficient design: {0}")]
    RankDeficient(String),

    #[error("duplicate location at rows {0} and {1}")]
    DuplicateLocation(usize, usize),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(String),

    #[error("empty input: {0}")]
    Empty(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, msg: impl Into<String>) -> Error {
    Error::Domain {
        func,
        msg: msg.into(),
    }
}
