use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("precision: {0}")]
    Precision(String),
    #[error("point beyond working radius ({0:.3} > {max})", max = crate::hypgeo::MAX_RADIUS)]
    OutOfRange(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("no balanced separator in {trials} trials (best balance {best_balance:.4})")]
    SeparatorFailed { trials: usize, best_balance: f64, best: Option<Box<crate::separator::CliqueSeparator>> },
    #[error("DP budget exceeded: {states} states > {max}")]
    Budget { states: usize, max: usize },
    #[error("search budget exceeded: {0}")]
    SearchLimit(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
