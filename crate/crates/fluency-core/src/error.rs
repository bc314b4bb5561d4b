//! Crate-wide error type.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Malformed {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("invalid JSON in {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("duplicate participant id `{0}`")]
    DuplicateParticipant(String),

    #[error("response at {path}:{line} references unknown participant `{participant}`")]
    UnknownParticipant {
        path: PathBuf,
        line: u64,
        participant: String,
    },

    #[error("participant sets differ; only in `{left}`: {only_left:?}, only in `{right}`: {only_right:?}")]
    ParticipantMismatch {
        left: String,
        right: String,
        only_left: Vec<String>,
        only_right: Vec<String>,
    },

    #[error("dataset `{0}` has no valid responses")]
    EmptyDataset(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("provider error for config `{config}`, participant `{participant}`: {message}")]
    Provider {
        config: String,
        participant: String,
        message: String,
    },

    #[error("simulation run for config `{config}` failed for {failed} of {total} participants")]
    RunFailed {
        config: String,
        failed: usize,
        total: usize,
    },

    #[error("refusing to overwrite existing output `{0}` (pass --force to replace)")]
    WouldOverwrite(PathBuf),

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn malformed(path: impl Into<PathBuf>, line: u64, message: impl Into<String>) -> Self {
        Error::Malformed {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Error::Invalid(message.into())
    }
}
