use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// A branch determinant is zero, so preimages are not isolated points.
    #[error("branch {branch} has zero determinant; preimage structure is nongeneric")]
    NongenericDeterminant { branch: char },

    #[error("invalid symbolic sequence: {0}")]
    InvalidSequence(String),

    #[error("recurrence index {0} is outside the supported range -1..=64")]
    RecurrenceIndex(i32),

    /// A numeric precondition of an operation does not hold at the given parameters.
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("segment set for {0} is virtual at these parameters")]
    Virtual(String),

    #[error("orbit escaped at step {step}")]
    Escaped { step: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed grid file: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidSequence(_) => 2,
            Error::Io { .. } | Error::Format(_) => 1,
            _ => 3,
        }
    }
}
