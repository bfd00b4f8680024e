use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("window contains no messages")]
    EmptyWindow,

    #[error("training set must contain both positive and negative examples")]
    SingleClass,

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("event {index}: wall_time goes backwards")]
    NonMonotonicTime { index: usize },

    #[error("k must be at least 1")]
    ZeroK,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
