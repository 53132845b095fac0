use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A metric denominator is zero because a group lacks a label class.
    #[error("empty class: {}", .missing.join(", "))]
    EmptyClass { missing: Vec<String> },

    #[error("group `{0}` has no samples")]
    EmptyGroup(String),

    #[error("sample group `{found}` is neither `{anchor}` nor `{adjusted}`")]
    UnknownGroup {
        found: String,
        anchor: String,
        adjusted: String,
    },

    #[error("capacity exceeded: {what} needs {needed}, budget is {budget}")]
    CapacityExceeded {
        what: &'static str,
        needed: u128,
        budget: u128,
    },

    #[error("invalid ordering: {0}")]
    InvalidOrdering(String),

    #[error("score mapping has no knots")]
    EmptyMapping,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid synthetic spec: {0}")]
    Spec(String),

    #[error("line {line}, column `{column}`: {reason}")]
    Parse {
        line: u64,
        column: String,
        reason: String,
    },

    #[error("expected exactly two groups, found {}: [{}]", .found.len(), .found.join(", "))]
    GroupCount { found: Vec<String> },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn empty_class(what: impl Into<String>) -> Self {
        Error::EmptyClass {
            missing: vec![what.into()],
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CapacityExceeded { .. } => 3,
            Error::EmptyClass { .. } | Error::EmptyGroup(_) | Error::EmptyMapping => 4,
            Error::Io { .. } => 1,
            _ => 2,
        }
    }
}
