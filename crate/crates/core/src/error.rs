use std::path::PathBuf;

/// Errors raised across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("index {index} out of range for {n} points")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("index sets overlap at point {0}")]
    Overlap(usize),

    #[error("empty index set")]
    EmptySet,

    #[error("invalid distance source: {0}")]
    InvalidSource(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("clustering needs at least 2 blocks, got {0}")]
    TooFewBlocks(usize),

    #[error("k = {k} out of range 1..={n}")]
    KOutOfRange { k: usize, n: usize },

    #[error("point count mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("parse error in {path:?}: {msg}")]
    Parse { path: Option<PathBuf>, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(path: Option<&std::path::Path>, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.map(|p| p.to_path_buf()),
            msg: msg.into(),
        }
    }
}
