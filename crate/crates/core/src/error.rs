use alloc::string::String;

/// Errors raised anywhere in the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("series lengths differ: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("embedding has no valid rows (series length {len})")]
    EmptyEmbedding { len: usize },

    #[error("too few points: need at least {needed}, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("degenerate distances: {zero_pairs} of {total_pairs} point pairs coincide")]
    DegenerateDistances { zero_pairs: u64, total_pairs: u64 },

    #[error("prediction lag {eta} outside the spectrum range 1..={max}")]
    LagOutOfRange { eta: usize, max: usize },

    #[error("process is not stationary: {0}")]
    NotStationary(String),

    #[error("model kind is invalid: {0}")]
    InvalidKind(String),

    #[error("covariance matrix is singular")]
    SingularCovariance,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("system diverged at step {step}")]
    Diverged { step: usize },

    #[error("no stable draw after {attempts} attempts")]
    RejectionLimit { attempts: usize },

    #[error("series too short: {len} points, need at least {needed}")]
    TooShort { len: usize, needed: usize },

    #[error("age range covers fewer than two bins")]
    EmptyRange,

    #[error("confusion matrix is empty")]
    EmptyMatrix,
}

pub type Result<T> = core::result::Result<T, Error>;
