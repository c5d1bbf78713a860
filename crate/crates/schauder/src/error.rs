use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}")]
    Validation(String),

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] schauder_core::Error),

    #[error("thread pool: {0}")]
    Pool(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// `1` for bad input, `2` for failures during computation.
    pub fn exit_code(&self) -> i32 {
        use schauder_core::Error as C;
        match self {
            Error::Validation(_) | Error::Parse { .. } | Error::Io { .. } => 1,
            Error::Core(C::InvalidParameter(_) | C::DimensionMismatch { .. } | C::LatticeIncompatible(_)) => 1,
            Error::Core(_) | Error::Pool(_) => 2,
        }
    }

    pub(crate) fn parse(path: &std::path::Path, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { path: path.to_path_buf(), line, msg: msg.into() }
    }
}
