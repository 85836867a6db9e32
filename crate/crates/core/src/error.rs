use std::path::PathBuf;

/// Errors raised while building codes, plans or experiments.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("code length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("invalid reliability sequence: {0}")]
    InvalidReliability(String),
    #[error("invalid rate: N={n}, K={k}, CRC width {crc_width}")]
    InvalidRate { n: usize, k: usize, crc_width: usize },
    #[error("frozen position {0} carries a nonzero bit")]
    FrozenViolation(usize),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("invalid CRC: {0}")]
    InvalidCrc(String),
    #[error("partition plan: {0}")]
    Partition(String),
    #[error("LDPC base matrix: {0}")]
    BaseMatrix(String),
    #[error("{field}: {message}")]
    Config { field: String, message: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
