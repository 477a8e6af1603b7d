use thiserror::Error;

/// Errors raised by coefficient, transform, tensor-product and benchmark operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("triangle condition fails for ({0}, {1}, {2})")]
    TriangleViolation(u32, u32, u32),
    #[error("({0}, {1}, {2}) is not interactable")]
    NotInteractable(u32, u32, u32),
    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),
    #[error("flop budget exceeded: projected {projected} > budget {budget}")]
    Budget { projected: u64, budget: u64 },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
