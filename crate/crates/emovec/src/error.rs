use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("binary embedding data at byte {offset}: {reason}")]
    BinaryFormat { offset: u64, reason: String },

    #[error("text embedding data at line {line}: {reason}")]
    TextFormat { line: usize, reason: String },

    #[error("vocabulary dump at line {line}: {reason}")]
    VocabFormat { line: usize, reason: String },

    #[error("description file at line {line}: {reason}")]
    DescriptionFormat { line: usize, reason: String },

    #[error("ranking file at line {line}: {reason}")]
    RankingFormat { line: usize, reason: String },

    #[error("dataset at line {line}: {reason}")]
    DatasetFormat { line: u64, reason: String },

    #[error("empty vocabulary: no token reaches the frequency threshold")]
    EmptyVocabulary,

    #[error("cosine similarity is undefined for a zero vector")]
    ZeroVector,

    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    #[error("\"{query}\" is not in the vocabulary; nearest spellings: {}", suggestions.join(", "))]
    QueryNotFound {
        query: String,
        suggestions: Vec<String>,
    },

    #[error("duplicate surface \"{0}\"")]
    DuplicateSurface(String),

    #[error("need at least two emoji descriptions so negatives can be drawn")]
    TooFewDescriptions,

    #[error("empty training set")]
    EmptyTrainingSet,

    #[error("training data contains a single class; need at least two")]
    SingleClass,

    #[error("empty evaluation set")]
    EmptyTestSet,

    #[error("invalid evaluation input: {0}")]
    EvalInput(String),
}

impl Error {
    /// Wraps an I/O error with the path it concerns.
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
