use thiserror::Error;

/// Crate-wide error type.
///
/// `Domain` covers precondition violations (bad levels, out-of-range data,
/// mismatched shapes), `Parse` covers CSV ingestion with the offending
/// location, and `Numerical`/`Linalg` cover solver and matrix failures that
/// leave no statistically valid result to report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error in {path} (row {row}): {message}")]
    Parse {
        path: String,
        row: usize,
        message: String,
    },

    #[error("linear algebra error: {0}")]
    Linalg(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code for the CLI: 1 for input/validation problems,
    /// 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Parse { .. } | Error::Io(_) => 1,
            Error::Linalg(_) | Error::Numerical(_) => 2,
        }
    }
}
