use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid Lie algebra: {0}")]
    InvalidAlgebra(String),
    #[error("invalid extension data: {0}")]
    InvalidExtension(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("integration diverged at t = {t}")]
    Diverged { t: f64 },
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
