use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("not a latin square: {0}")]
    InvalidSquare(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("group closure exceeded {0} elements")]
    CapExceeded(usize),
    #[error("division left a remainder: {0}")]
    NonIntegral(String),
    #[error("consistency check failed: {0}")]
    Inconsistent(String),
    #[error("search budget exhausted")]
    BudgetExhausted,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
