use thiserror::Error;

/// Errors produced by the core library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("tensor with {entries} entries exceeds the entry budget of {budget}")]
    Capacity { entries: String, budget: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("slot {slot} out of range for a form of degree {degree}")]
    SlotOutOfRange { slot: usize, degree: usize },

    #[error("no exact oracle available: {0}")]
    OracleUnavailable(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no constant known for this parameter point; supply one explicitly")]
    MissingConstant,

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
