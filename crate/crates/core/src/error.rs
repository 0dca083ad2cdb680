use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix is not doubly stochastic: {0}")]
    Infeasible(String),

    #[error("instance of order {n} exceeds the enumeration cap of {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("malformed QAPLIB data: expected {expected} tokens, found {found}")]
    Malformed { expected: usize, found: usize },

    #[error("cannot parse token {token:?} at position {position}")]
    Parse { position: usize, token: String },

    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
