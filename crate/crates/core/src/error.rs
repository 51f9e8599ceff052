use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("index out of range: level {level}, index {index}")]
    Index { level: u64, index: String },
    #[error("support error: {0}")]
    Support(String),
    #[error("lift window error: {0}")]
    Window(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("sampling plan is empty")]
    EmptyPlan,
}

pub type Result<T> = std::result::Result<T, Error>;
