use std::path::PathBuf;

use thiserror::Error;

use crate::metric::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range for metric of size {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("h must be at least 2, got {0}")]
    DepthTooSmall(usize),

    #[error("metric space is empty")]
    EmptyMetric,

    #[error("n = {0} exceeds the supported maximum of 2^32 points")]
    TooManyPoints(usize),

    #[error("value {value} has more than {digits} base-{base} digits")]
    DigitOverflow {
        value: u64,
        base: u64,
        digits: usize,
    },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("metric axioms violated ({} violation(s))", .0.len())]
    InvalidMetric(Vec<Violation>),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
