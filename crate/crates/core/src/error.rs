use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("unknown language code `{0}`")]
    UnknownLanguage(String),

    #[error("unknown script `{0}`")]
    UnknownScript(String),

    #[error("invalid direction `{0}`")]
    InvalidDirection(String),

    #[error("line count mismatch: {src_lines} source lines vs {tgt_lines} target lines")]
    LineCountMismatch { src_lines: usize, tgt_lines: usize },

    #[error("{path}: invalid UTF-8 on line {line}")]
    Encoding { path: PathBuf, line: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("subword model is untrained")]
    UntrainedModel,

    #[error("target vocabulary size {target} is below the base vocabulary size {base}")]
    TargetTooSmall { target: usize, base: usize },

    #[error("corpus contains no trainable words")]
    EmptyCorpus,

    #[error("invalid character coverage {0}; expected 0 < coverage <= 1")]
    InvalidCoverage(f64),

    #[error("malformed model file: {0}")]
    ModelFormat(String),

    #[error("merge list is empty")]
    EmptyMergeList,

    #[error("threshold {threshold} does not exceed the base vocabulary size {base}")]
    ThresholdTooSmall { threshold: usize, base: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid model config: {0}")]
    InvalidConfig(String),

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("loss diverged (NaN) at epoch {epoch}, step {step}")]
    DivergedLoss { epoch: usize, step: usize },

    #[error("hypothesis/reference length mismatch: {hyps} vs {refs}")]
    LengthMismatch { hyps: usize, refs: usize },

    #[error("invalid family spec: {0}")]
    InvalidSpec(String),

    #[error("root `{0}` is not in the lexicon")]
    UnknownRoot(String),

    #[error("direction coverage check failed: {0}")]
    Coverage(String),

    #[error("result tables do not share a language set")]
    LanguageSetMismatch,

    #[error("invalid experiment config: {0}")]
    InvalidExperiment(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
