use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid cutoffs ({cutoff_a}, {cutoff_b}): {reason}")]
    InvalidCutoff {
        cutoff_a: usize,
        cutoff_b: usize,
        reason: &'static str,
    },
    #[error("Fock index ({n_a}, {n_b}) outside cutoffs ({cutoff_a}, {cutoff_b})")]
    OutOfRangeIndex {
        n_a: usize,
        n_b: usize,
        cutoff_a: usize,
        cutoff_b: usize,
    },
    #[error("amplitude vector has zero norm")]
    ZeroNorm,
    #[error("operands live on different Fock spaces")]
    SpaceMismatch,
    #[error("operator `{0}` is not hermitian")]
    NonHermitianInput(String),
    #[error("matrix of size {rows}x{cols} does not match space dimension {dim}")]
    DimensionMismatch { rows: usize, cols: usize, dim: usize },
    #[error("expected a {expected} state representation")]
    WrongRepresentation { expected: &'static str },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("guard {guard} out of range for cutoffs ({cutoff_a}, {cutoff_b})")]
    GuardOutOfRange {
        guard: usize,
        cutoff_a: usize,
        cutoff_b: usize,
    },
    #[error("parameter `{name}` = {value} out of range: {reason}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        reason: String,
    },
    #[error("cutoffs too small: tail mass {tail:e} exceeds guard tolerance {tolerance:e}")]
    InsufficientCutoff { tail: f64, tolerance: f64 },
    #[error("operation requires an exact covariance record")]
    EstimatedRecord,
    #[error("operation requires an estimated covariance record")]
    ExactRecord,
    #[error("missing measurement record for phase setting {0}")]
    MissingPhaseSetting(&'static str),
    #[error("measurement records come from inconsistent preparations: {0}")]
    InconsistentSpace(String),
    #[error("shot count must be at least 1")]
    ZeroShots,
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
