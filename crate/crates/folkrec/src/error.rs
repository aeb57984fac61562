//! Error taxonomy mapped onto the CLI exit codes: usage errors exit with 1,
//! data errors with 2.

use std::path::PathBuf;

/// Problems with flags, config keys or parameter values.
#[derive(Debug, thiserror::Error)]
pub enum UsageError {
    #[error("unknown algorithm {0:?}")]
    UnknownAlgorithm(String),
    #[error("no algorithms selected")]
    NoAlgorithms,
    #[error("invalid column specification {spec:?}: {reason}")]
    InvalidColumns { spec: String, reason: String },
    #[error(
        "invalid delimiter {0:?}: expected tab, comma, semicolon, space or a single character"
    )]
    InvalidDelimiter(String),
    #[error("{path}:{line}: {reason}")]
    Config {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("invalid value for {key}: {reason}")]
    InvalidValue { key: &'static str, reason: String },
    #[error("missing required option {0}")]
    MissingOption(&'static str),
}

/// Problems with the data itself: unreadable, malformed or degenerate.
#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("empty dataset")]
    EmptyDataset,
    #[error("snapshot has unsupported version {found:?} (expected {expected:?})")]
    SnapshotVersion {
        expected: &'static str,
        found: String,
    },
    #[error("snapshot truncated: expected {expected} assignment lines, found {found}")]
    SnapshotTruncated { expected: u64, found: u64 },
    #[error("snapshot corrupt: {0}")]
    SnapshotCorrupt(String),
    #[error("test set is empty after splitting")]
    EmptyTestSet,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Folksonomy(#[from] folkrec_core::FolksonomyError),
}

/// Top-level error with the CLI exit code attached.
#[derive(Debug, thiserror::Error)]
pub enum FolkrecError {
    #[error(transparent)]
    Usage(#[from] UsageError),
    #[error(transparent)]
    Data(#[from] DataError),
}

impl FolkrecError {
    pub fn exit_code(&self) -> i32 {
        match self {
            FolkrecError::Usage(_) => 1,
            FolkrecError::Data(_) => 2,
        }
    }
}

impl From<folkrec_core::FolksonomyError> for FolkrecError {
    fn from(err: folkrec_core::FolksonomyError) -> Self {
        FolkrecError::Data(err.into())
    }
}

/// Wraps an IO error with the path it occurred on.
pub fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> DataError {
    let path = path.into();
    move |source| DataError::Io { path, source }
}
