use std::path::PathBuf;

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("labels contain a single class; fall back to uniform probabilities until a second class is labeled")]
    SingleClass,
    #[error("lexicon has no entry for emotion category `{0}`")]
    MissingLexiconEntry(String),
    #[error("unknown group id {0}")]
    UnknownGroup(i64),
    #[error("requested {requested} components but only {available} are numerically available")]
    RankDeficient { requested: usize, available: usize },
    #[error("too few samples for cross-validation: {0}")]
    TooFewSamples(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
