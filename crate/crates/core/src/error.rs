use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid rank {rank} for type {family}: {constraint}")]
    InvalidRank { family: char, rank: usize, constraint: &'static str },

    #[error("unknown root system {0:?} (expected e.g. \"A3\", \"F4\")")]
    UnknownKind(String),

    #[error("not a positive root of {kind}: {root:?}")]
    NotARoot { kind: String, root: Vec<u32> },

    #[error("order search exhausted at {root:?}: no witness found (internal consistency failure)")]
    OrderSearchExhausted { root: Vec<u32> },

    #[error("structure constants failed the Jacobi identity on {failures} triple(s)")]
    JacobiFailure { failures: usize },

    #[error("a simple entry vanishes; only the simple case is supported")]
    NotSimpleCase,

    #[error("elements are not conjugate: {0}")]
    NotConjugate(String),

    #[error("mismatched root systems: {0} vs {1}")]
    KindMismatch(String, String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("malformed input at byte {offset}: {message}")]
    Malformed { offset: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
