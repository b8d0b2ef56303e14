use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed manifest {path}: {message}")]
    Manifest { path: PathBuf, message: String },

    #[error("{path}:{line}: non-numeric cell {cell:?}")]
    NonNumeric {
        path: PathBuf,
        line: usize,
        cell: String,
    },

    #[error("{path}:{line}: label {token:?} is not one of -1, +1")]
    LabelDomain {
        path: PathBuf,
        line: usize,
        token: String,
    },

    #[error("row count mismatch: {what} has {found} rows, expected {expected}")]
    RowMismatch {
        what: String,
        expected: usize,
        found: usize,
    },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("bad IDX magic 0x{found:08x}, expected 0x{expected:08x}")]
    BadMagic { expected: u32, found: u32 },

    #[error("truncated IDX file: {0}")]
    Truncated(String),

    #[error("count mismatch: {images} images but {labels} labels")]
    CountMismatch { images: usize, labels: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The C-Bound precondition (Gibbs risk and disagreement below 1/2) fails.
    #[error("C-Bound infeasible: weighted risk {risk} or disagreement {disagreement} is not below 1/2")]
    Infeasible { risk: f64, disagreement: f64 },

    /// A kl-interval is empty.
    #[error("empty kl interval: kl({q} || {cap}) exceeds budget {budget}")]
    EmptyInterval { q: f64, cap: f64, budget: f64 },

    #[error("unknown algorithm {0:?}")]
    UnknownAlgorithm(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input (files, arguments) rather than
    /// a failure during computation.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::Infeasible { .. } | Error::EmptyInterval { .. }
        )
    }
}
