use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("invalid data: {0}")]
    InvalidData(String),
    #[error("not symmetric: |a[{i}][{j}] - a[{j}][{i}]| = {diff:e}")]
    NotSymmetric { i: usize, j: usize, diff: f64 },
    #[error("eig divergence after {sweeps} sweeps")]
    EigDivergence { sweeps: usize },
    #[error("not positive definite: pivot {pivot} is {value:e}")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid stats: {0}")]
    InvalidStats(String),
    #[error("k exceeds dimension: k = {k}, dimension = {dim}")]
    KExceedsDimension { k: usize, dim: usize },
    #[error("invalid k: {k} (allowed 1..={max})")]
    InvalidK { k: usize, max: usize },
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),
    #[error("invalid start: objective is not finite at the initial point")]
    InvalidStart,
    #[error("signal too short: length {len}, need {needed}")]
    SignalTooShort { len: usize, needed: usize },
    #[error("non-integer decimation: {target} does not divide {len}")]
    NonIntegerDecimation { len: usize, target: usize },
    #[error("not a power of two: {0}")]
    NotPowerOfTwo(usize),
    #[error("cannot stratify: label pattern {pattern} has {count} example(s)")]
    CannotStratify { pattern: String, count: usize },
    #[error("invalid option: {0}")]
    InvalidOption(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(String),
    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
