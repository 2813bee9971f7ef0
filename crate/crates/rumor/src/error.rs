use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] rumor_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("io error: {0}")]
    Stream(#[from] io::Error),

    #[error("{what} line {line}: {msg}")]
    Parse {
        what: &'static str,
        line: usize,
        msg: String,
    },

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("missing config key `{0}`")]
    MissingKey(String),

    #[error("invalid value for `{key}`: {msg}")]
    BadValue { key: String, msg: String },

    #[error("{0}")]
    Usage(String),

    #[error("run aborted: {0}")]
    Aborted(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit status: 2 for bad input, 3 for failures on our side.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Aborted(_) | Error::Internal(_) => 3,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
