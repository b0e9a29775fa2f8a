use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("bad magic: expected {expected}, found {found}")]
    BadMagic {
        expected: &'static str,
        found: String,
    },

    #[error("unsupported link type {0} (only Ethernet is supported)")]
    UnsupportedLinkType(u32),

    #[error("record {index} captured length {captured_len} exceeds snaplen {snaplen}")]
    RecordExceedsSnaplen {
        index: usize,
        captured_len: u32,
        snaplen: u32,
    },

    #[error("decode error: {0}")]
    Decode(String),

    #[error("session has no packets")]
    EmptySession,

    #[error("feature width mismatch: expected {expected}, found {found}")]
    MixedFeatureWidth { expected: usize, found: usize },

    #[error("unsupported format version {found} (expected {expected})")]
    VersionMismatch { expected: u32, found: u32 },

    #[error("corrupt length: {0}")]
    CorruptLength(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("segment {0} is empty")]
    EmptySegment(usize),

    #[error("non-finite value in {0}")]
    NonFiniteInput(&'static str),

    #[error("dimension mismatch: {0}")]
    DimsMismatch(String),

    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },

    #[error("dataset is empty: {0}")]
    EmptyDataset(&'static str),

    #[error("confusion matrix is empty")]
    EmptyMatrix,

    #[error("split `{0}` is empty")]
    EmptySplit(String),

    #[error("no label directories under {0}")]
    NoLabels(PathBuf),

    #[error("no sessions survived preprocessing")]
    NoSessions,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
