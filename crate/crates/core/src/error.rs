use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("size budget exceeded: {0}")]
    Budget(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("internal invariant broken: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
