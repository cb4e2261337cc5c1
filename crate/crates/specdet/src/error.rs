//! Crate-wide error type.

use std::path::PathBuf;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed audio container: {0}")]
    Format(String),

    #[error("unsupported codec: {0}")]
    UnsupportedCodec(String),

    #[error("audio stream contains no samples")]
    EmptyAudio,

    #[error("manifest parse error at line {line}: {msg}")]
    ManifestParse { line: usize, msg: String },

    #[error("manifest validation error at line {line}: {msg}")]
    ManifestValidation { line: usize, msg: String },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("expected {expected} Hz audio, got {got} Hz")]
    SampleRate { expected: u32, got: u32 },

    #[error("input too short: {0}")]
    TooShort(String),

    #[error("sequence of {needed} positions exceeds positional table of {capacity}")]
    Capacity { needed: usize, capacity: usize },

    #[error("tensor shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("bad checkpoint file: {0}")]
    CheckpointFormat(String),

    #[error("bad feature cache file: {0}")]
    FeatureCacheFormat(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("EER undefined: {0}")]
    EerUndefined(String),

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
