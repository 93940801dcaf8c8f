use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{0}: no instances")]
    NoInstances(PathBuf),

    #[error("invalid split: {0}")]
    InvalidSplit(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite coordinate")]
    NonFinite,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("zero-volume box: sampling interval [{lo}, {hi}] is degenerate")]
    ZeroVolumeBox { lo: f64, hi: f64 },

    #[error("test instance not enclosed after {attempts} hyperstructure draws")]
    EnclosureFailed { attempts: usize },

    #[error("simplex exceeded {0} pivots")]
    PivotLimit(usize),

    #[error("training data has a single class; at least two are required")]
    SingleClass,
}
