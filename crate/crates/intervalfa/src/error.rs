use std::io;

use thiserror::Error;

/// Failure modes across the crate, grouped by the process exit code the
/// command-line front end maps them to: input problems exit 2, numeric
/// failures exit 3, non-convergence exits 4.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    /// A malformed value in a specific data cell.
    #[error("row {row}, column {col}: {msg}")]
    Cell { row: usize, col: String, msg: String },

    /// The triangular model needs a mode on every observation.
    #[error("column {col} has observations without a mode; the triangular model requires one")]
    MissingMode { col: String },

    /// A variable with zero sample variance cannot be standardized or
    /// correlated.
    #[error("column {col} has zero sample variance")]
    DegenerateVariable { col: String },

    /// Argument outside its domain (bad bounds, t outside [0,1], dimension
    /// mismatches, ...).
    #[error("{0}")]
    Domain(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("did not converge: {0}")]
    NonConvergence(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    /// Exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numeric(_) => 3,
            Error::NonConvergence(_) => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
