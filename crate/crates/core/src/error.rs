use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {}", .0.display())]
    MissingFile(PathBuf),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },

    #[error("duplicate utterance id `{0}`")]
    DuplicateUtteranceId(String),

    #[error("label `{label}` is not declared for corpus `{corpus}`")]
    UnknownLabel { corpus: String, label: String },

    #[error("unknown feature name `{0}`")]
    UnknownFeatureName(String),

    #[error("line {line}, column `{column}`: non-numeric value `{value}`")]
    NonNumericValue {
        line: usize,
        column: String,
        value: String,
    },

    #[error("line {line}: expected {expected} fields, found {found}")]
    RowLengthMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("utterance `{0}` has no manifest entry")]
    UnknownUtterance(String),

    #[error("label `{label}` of corpus `{corpus}` is not covered by alignment {scheme}")]
    UnmappedLabel {
        scheme: String,
        corpus: String,
        label: String,
    },

    #[error("alignment {scheme} leaves corpus `{corpus}` degenerate: {reason}")]
    DegenerateAlignment {
        scheme: String,
        corpus: String,
        reason: String,
    },

    #[error("invalid alignment scheme {scheme}: {reason}")]
    InvalidAlignment { scheme: String, reason: String },

    #[error("class `{class}` has {count} fold units, need at least {k}")]
    TooFewRowsPerClass {
        class: String,
        count: usize,
        k: usize,
    },

    #[error("standardizer needs at least one training row")]
    EmptyTrainingSet,

    #[error("signal too short: {samples} samples, need {needed}")]
    SignalTooShort { samples: usize, needed: usize },

    #[error("no voiced frames in signal")]
    NoVoicedFrames,

    #[error("no audible segments in signal")]
    NoAudibleSegments,

    #[error("unsupported audio: {0}")]
    UnsupportedAudio(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("classifier needs at least 2 classes with 2 rows each, found {0} usable classes")]
    DegenerateClassCount(usize),

    #[error("feature column `{0}` is missing from the matrix")]
    MissingFeatureColumn(String),

    #[error("feature index {index} out of range for catalog of {len}")]
    FeatureIndexOutOfRange { index: usize, len: usize },

    #[error("no segment predictions to aggregate")]
    EmptyPredictionSet,

    #[error("no feature reached inclusion probability {threshold}")]
    EmptyResult { threshold: f64 },

    #[error("feature subset is empty")]
    EmptySubset,

    #[error("intersection of subsets is empty")]
    EmptyIntersection,

    #[error("need at least {needed} subsets, got {got}")]
    TooFewSubsets { needed: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid plan: {0}")]
    InvalidPlan(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("corpus `{corpus}`: {source}")]
    Corpus {
        corpus: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::MissingFile(path)
        } else {
            Error::Io { path, source }
        }
    }

    pub(crate) fn in_corpus(self, corpus: &str) -> Self {
        Error::Corpus {
            corpus: corpus.to_string(),
            source: Box::new(self),
        }
    }
}
