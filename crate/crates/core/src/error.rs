use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Error, Debug)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("malformed record ({context}): {message}")]
    MalformedRecord { context: String, message: String },

    #[error("sequence overflow: {0}")]
    Overflow(String),

    #[error("shape mismatch at {stage}: expected {expected}, got {actual}")]
    Shape {
        stage: String,
        expected: String,
        actual: String,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn shape(stage: &str, expected: impl Into<String>, actual: impl Into<String>) -> Self {
        Error::Shape {
            stage: stage.to_string(),
            expected: expected.into(),
            actual: actual.into(),
        }
    }
}
