use thiserror::Error;

/// Errors produced by constructors and bound evaluations.
///
/// Divergence results themselves are total on their domain: support
/// mismatches and overflow come back as infinite values, not errors. An
/// `Error` means the inputs were malformed or a parameter was out of
/// range.
#[derive(Debug, Error)]
pub enum Error {
    #[error("probability {0} is not in [0, 1]")]
    InvalidProbability(f64),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("divergence order {0} is invalid; this family is defined for finite orders above 1")]
    InvalidOrder(f64),

    #[error("generator rejected: {0}")]
    InvalidGenerator(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
