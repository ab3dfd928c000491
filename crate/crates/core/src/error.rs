use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the imaging pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Two points coincide where a kernel is singular.
    #[error("singularity: {0}")]
    Singularity(String),
    /// A factorization or solve broke down.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    /// A requested evaluation cannot meet its accuracy contract.
    #[error("accuracy error: {0}")]
    Accuracy(String),
    /// Bad configuration, mismatched inputs, or misuse of an API.
    #[error("usage error: {0}")]
    Usage(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI: 1 for usage and I/O problems, 2 for
    /// numerical trouble.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Io { .. } => 1,
            Error::Domain(_)
            | Error::Singularity(_)
            | Error::NumericalFailure(_)
            | Error::Accuracy(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
