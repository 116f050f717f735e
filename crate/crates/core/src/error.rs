use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("orbit escaped: non-finite state at index {index}")]
    OrbitEscaped { index: usize },

    #[error("window exceeds trajectory: index {needed} requested, trajectory length {len}")]
    WindowExceedsTrajectory { needed: usize, len: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("word of length {word} is longer than text of length {text}")]
    WordTooLong { word: usize, text: usize },

    #[error("insufficient prefix: {needed} symbols needed, {available} available")]
    InsufficientPrefix { needed: usize, available: usize },

    #[error("brute force limited to {max} vertices, got {n}")]
    TooLarge { n: usize, max: usize },

    #[error("level {level} is not explicit")]
    NotExplicit { level: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
