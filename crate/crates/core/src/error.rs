use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} would examine {size} points (limit {limit}); {hint}")]
    TooLarge {
        what: &'static str,
        size: String,
        limit: u64,
        hint: &'static str,
    },

    #[error("numerical domain error: {0}")]
    NumericalDomain(String),

    #[error("level set is empty: {0}")]
    LevelSetEmpty(String),

    #[error("phase function is not translation-invariant; use the brute-force counter")]
    UnsupportedPhase,

    #[error("degenerate regression: {0}")]
    DegenerateRegression(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
