use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} out of supported range 2..=257")]
    OutOfRange(u64),
    #[error("digit {digit} out of range for q={q}")]
    DigitOutOfRange { digit: u64, q: u64 },
    #[error("code {code} out of range for q={q}, n={n}")]
    CodeOutOfRange { code: u64, q: u64, n: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("field mismatch: expected q={expected}, got q={got}")]
    FieldMismatch { expected: u64, got: u64 },
    #[error("bad set-file header (line {line}): {reason}")]
    BadHeader { line: usize, reason: String },
    #[error("bad digit on line {line}: {reason}")]
    BadDigit { line: usize, reason: String },
    #[error("duplicate point on line {line}")]
    DuplicatePoint { line: usize },
    #[error("no valid coefficient triple: {0}")]
    InvalidTriple(String),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("index set is not independent for the tensor")]
    NotIndependent,
    #[error("no permutation of the coefficients keeps all prefix sums nonzero")]
    NoValidRearrangement,
    #[error("set has {have} points but {need} distinct coordinates are required")]
    TooSmall { have: usize, need: usize },
    #[error("target light fraction {target} unreachable; best achieved {achieved}")]
    Infeasible { target: f64, achieved: f64 },
    #[error("bad config: {0}")]
    BadConfig(String),
}
