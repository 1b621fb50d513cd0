use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("profile has no entry for infoset {0}")]
    MissingInfoSet(String),

    #[error("unknown infoset {0}")]
    UnknownInfoSet(String),

    #[error("malformed infoset key {key:?}: {reason}")]
    MalformedKey { key: String, reason: String },

    #[error("empty vector")]
    EmptyVector,

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("empty dataset")]
    EmptyDataset,

    #[error("feature collision: one feature vector maps to targets {first} and {second}")]
    FeatureCollision { first: f64, second: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("invalid strategy at {key}: {reason}")]
    InvalidStrategy { key: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
