use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("q = {0} is not a prime power >= 2")]
    NotPrimePower(u64),
    #[error("q = {0} is too large for this implementation")]
    FieldTooLarge(u64),
    #[error("element {0} is not in the fixed field")]
    NotFixed(u32),
    #[error("operation requires q = {required}, got q = {actual}")]
    WrongQ { required: u32, actual: u32 },
    #[error("nonzero scalar required: {0}")]
    ZeroScalar(&'static str),
    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not hermitian")]
    NotHermitian,
    #[error("matrices are not adjacent")]
    NotAdjacent,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{what} needs {required}, budget is {budget}")]
    Budget { what: String, required: u128, budget: u128 },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
