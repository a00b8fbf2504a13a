use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("matrix is not symmetric: |a[{row}][{col}] - a[{col}][{row}]| = {diff:e}")]
    NotSymmetric { row: usize, col: usize, diff: f64 },

    #[error("graph has self-loops; {0} is undefined for loops")]
    LoopsPresent(&'static str),

    #[error("cannot contract degree-2 vertices: {0}")]
    Contraction(String),

    #[error("rewiring gave up after {attempts} attempts with {remaining} offending edges: degree sequence not realizable or pathological")]
    RewireFailed { attempts: usize, remaining: usize },

    #[error("no real root in [{lo}, {hi}]")]
    NoRoot { lo: f64, hi: f64 },

    #[error("no admissible singularity: {0}")]
    NoAdmissibleRoot(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("inadmissible generating-function system: {0}")]
    Inadmissible(String),

    #[error("unknown system kind `{0}`")]
    UnknownSystem(String),

    #[error("series tail is not positive at index {0}")]
    NonPositiveTail(usize),

    #[error("graph still disconnected after {0} resamples")]
    Disconnected(usize),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParams(msg.into()))
}
