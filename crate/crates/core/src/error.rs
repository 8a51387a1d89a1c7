use thiserror::Error;

/// Errors produced by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid challenge: {0}")]
    InvalidChallenge(String),

    #[error("invalid phi vector: {0}")]
    InvalidPhi(String),

    #[error("dimension mismatch: expected {expected} stages, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("correlation {0} lies outside [-1, 1]")]
    CorrelationOutOfRange(f64),

    /// The conditioning event has probability zero, e.g. two perfectly
    /// anti-correlated challenges reported with the same response.
    #[error("degenerate evidence: {0}")]
    DegenerateEvidence(String),

    #[error("infeasible correlation triple: {0}")]
    InfeasibleTriple(String),

    #[error("infeasible neighborhood cell: {0}")]
    InfeasibleCell(String),

    #[error("member index {index} out of range for a cell of {count} members")]
    IndexOutOfRange { index: String, count: String },

    #[error("value {value} of {semimetric} is not reachable at n = {n}")]
    Unreachable { semimetric: String, value: f64, n: usize },

    #[error("rejection sampling accepted only {accepted} samples (need at least {required})")]
    InsufficientSamples { accepted: u64, required: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
