use std::path::PathBuf;

use thiserror::Error;

/// Broad failure class, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Invalid parameters or an unusable combination of options.
    Config,
    /// Bad, missing or inconsistent input data.
    Data,
    /// A numerical or logic failure inside the library.
    Internal,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("io: cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("corpus: line {line}: malformed record: {reason}")]
    MalformedRecord { line: usize, reason: String },

    #[error("corpus: duplicate document id {id:?} at line {line}")]
    DuplicateId { id: String, line: usize },

    #[error("corpus: empty document id at line {line}")]
    EmptyId { line: usize },

    #[error("corpus: no documents found in {0}")]
    EmptyCorpus(PathBuf),

    #[error(
        "corpus: category {category:?} has {count} document(s); at least 2 are required to split"
    )]
    CategoryTooSmall { category: String, count: usize },

    #[error("corpus: train fraction {0} is outside (0, 1)")]
    InvalidFraction(f64),

    #[error("corpus: unknown category {0:?}")]
    UnknownCategory(String),

    #[error("thesaurus: line {line}: {reason}")]
    MalformedThesaurus { line: usize, reason: String },

    #[error("preprocess: line {line}: {reason}")]
    MalformedWordList { line: usize, reason: String },

    #[error("term selection: at least 2 categories are required, got {0}")]
    TooFewCategories(usize),

    #[error("term selection: category {0:?} not present in term statistics")]
    CategoryNotInStats(String),

    #[error("weighting: term {term:?} occurs in a document but has document frequency 0")]
    IndexInconsistency { term: String },

    #[error("weighting: vocabulary is empty")]
    EmptyVocabulary,

    #[error("classifier: no training vectors")]
    NoTrainingData,

    #[error("classifier: non-finite weight in category {category:?} at epoch {epoch}")]
    NonFinite { category: String, epoch: usize },

    #[error("classifier: invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),

    #[error("model: format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: String, expected: u32 },

    #[error("model: corrupted file: {0}")]
    Corrupted(String),

    #[error("evaluation: {gold} gold labels but {predicted} predictions")]
    LengthMismatch { gold: usize, predicted: usize },

    #[error("evaluation: no predictions to score")]
    NoPredictions,

    #[error("evaluation: reports were computed on different test sets")]
    MismatchedTestSets,

    #[error("evaluation: at least 2 reports are required for a comparison, got {0}")]
    TooFewReports(usize),

    #[error("config: {0}")]
    Config(String),

    #[error("serialization: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidFraction(_)
            | Error::TooFewCategories(_)
            | Error::InvalidHyperparameter(_)
            | Error::TooFewReports(_)
            | Error::Config(_) => ErrorKind::Config,
            Error::NonFinite { .. } | Error::Serde(_) => ErrorKind::Internal,
            _ => ErrorKind::Data,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
