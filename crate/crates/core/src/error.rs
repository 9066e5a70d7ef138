use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("wordlist header is missing required column(s): {}", .0.join(", "))]
    MissingColumns(Vec<String>),

    #[error("line {line}: duplicate row ID {id:?}")]
    DuplicateId { id: String, line: usize },

    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },

    #[error("reserved segment {0:?} cannot appear in a word form")]
    ReservedToken(String),

    #[error("invalid sound token {0:?}")]
    InvalidToken(String),

    #[error("alignment error: {0}")]
    Alignment(String),

    #[error("cognate set {cogid}: empty reconstruction")]
    EmptyReconstruction { cogid: String },

    #[error("assembled form is empty")]
    EmptyForm,

    #[error("cognate set {cogid}: no column has reflex support")]
    NoReflexSupport { cogid: String },

    #[error("no training instances")]
    EmptyTraining,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed fuzzy pattern {pattern:?}: {reason}")]
    Pattern { pattern: String, reason: String },

    #[error("model file line {line}: {message}")]
    ModelFormat { line: usize, message: String },

    #[error("synthetic data: {0}")]
    Synth(String),

    #[error("baseline memory is empty")]
    EmptyMemory,

    #[error("{path}: {source}")]
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
}
