use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller supplied an out-of-range or inconsistent argument.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The requested operation is not supported for inputs of this size.
    #[error("unsupported: {0}")]
    Capability(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// A broken internal invariant. Always a bug.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
