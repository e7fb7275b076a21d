use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid point cloud: {0}")]
    InvalidCloud(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("dimension {0} is not supported by this operation")]
    DimensionUnsupported(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("sample size {got} does not match the reference model size {expected}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("simplex budget exceeded: more than {0} simplices")]
    BudgetExceeded(usize),

    #[error("brute-force Čech filtration limited to {max} points, got {got}")]
    TooLarge { max: usize, got: usize },

    #[error("distribution is not univariate")]
    NotUnivariate,

    #[error("invalid distribution spec: {0}")]
    InvalidSpec(String),

    #[error("invalid cdf: {0}")]
    InvalidCdf(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse { row: usize, column: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
