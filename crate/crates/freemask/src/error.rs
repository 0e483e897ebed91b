use thiserror::Error;

/// Crate-wide error type. Variants map onto CLI exit codes and FFI status
/// codes, so a new variant needs a home in both mappings.
#[derive(Debug, Error)]
pub enum Error {
    /// Mathematically invalid input (wrong dimensions, out-of-range parameter).
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid experiment configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Text input that does not match the expected grammar. Column is 1-based.
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },

    /// An enumeration or summation would exceed its term budget.
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    /// Numerical routine failed to converge or violated a sanity check.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn parse(column: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            column,
            message: msg.into(),
        }
    }

    pub fn size_limit(msg: impl Into<String>) -> Self {
        Error::SizeLimit(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
