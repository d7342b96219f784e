use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid label schema: {0}")]
    InvalidSchema(String),

    #[error("{}unknown label {label:?}", line_prefix(*line))]
    UnknownLabel { label: String, line: Option<usize> },

    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: usize, reason: String },

    #[error("line {line}: duplicate sample id {id:?}")]
    DuplicateId { id: String, line: usize },

    #[error("prediction header: {0}")]
    BadHeader(String),

    #[error("no prediction for sample {0:?}")]
    MissingSample(String),

    #[error("line {line}: prediction for unknown sample {id:?}")]
    ExtraSample { id: String, line: usize },

    #[error("line {line}: bad probability row for sample {id:?}: {reason}")]
    BadProbability {
        id: String,
        line: usize,
        reason: String,
    },

    #[error("model weight {0} outside [0, 1]")]
    WeightOutOfRange(f64),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("duplicate model id {0:?}")]
    DuplicateModelId(String),

    #[error("gold has {gold} labels but prediction has {pred}")]
    LengthMismatch { gold: usize, pred: usize },

    #[error("label index {index} out of range for {count} classes")]
    LabelOutOfRange { index: usize, count: usize },

    #[error("cannot evaluate an empty sample set")]
    EmptyInput,

    #[error("top-k of {k} requested but only {available} models available")]
    KTooLarge { k: usize, available: usize },

    #[error("ensemble needs at least one model")]
    EmptyBundle,

    #[error("all model weights are zero")]
    AllZeroWeights,

    #[error("invalid simulation spec: {0}")]
    BadSpec(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot serialize: {0}")]
    Serialize(String),
}

fn line_prefix(line: Option<usize>) -> String {
    match line {
        Some(l) => format!("line {l}: "),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
