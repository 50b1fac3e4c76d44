use std::path::PathBuf;

use thiserror::Error;

use crate::model::Violation;
use crate::sense::SenseId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid sense index `{0}`")]
    InvalidSenseIndex(String),

    #[error("annotation of `{word}` is invalid ({} violation(s))", violations.len())]
    InvalidAnnotation {
        word: String,
        violations: Vec<Violation>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{location}: {message}")]
    Malformed { location: String, message: String },

    #[error("{location}: expected dimension {expected}, found {found}")]
    DimensionMismatch {
        location: String,
        expected: usize,
        found: usize,
    },

    #[error("{location}: non-finite value")]
    NonFinite { location: String },

    #[error("number of senses must be at least 1")]
    NoSenses,

    #[error("number of edge labels must be at least 1")]
    NoLabels,

    #[error("{n} senses exceeds the configured ceiling of {ceiling}")]
    CeilingExceeded { n: usize, ceiling: usize },

    #[error("node {0} cannot be reached from the root with a finite score")]
    Unreachable(usize),

    #[error("no sense is labelled prototype")]
    NoPrototype,

    #[error("sense sets differ for `{0}`")]
    MismatchedSenses(String),

    #[error("need at least {needed} items, got {got}")]
    TooFew { needed: usize, got: usize },

    #[error("paired inputs differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("no embedding for sense {0}")]
    MissingEmbedding(SenseId),

    #[error("non-finite {what} loss at epoch {epoch}")]
    NonFiniteLoss { what: String, epoch: usize },

    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn malformed(location: impl std::fmt::Display, message: impl Into<String>) -> Self {
        Error::Malformed {
            location: location.to_string(),
            message: message.into(),
        }
    }
}
