use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("empty time window")]
    EmptyWindow,

    #[error("time {t} is not a nonnegative multiple of delta = {delta}")]
    TimeGrid { t: f64, delta: f64 },

    #[error("derivative denominator vanishes at xi = {xi}")]
    Singularity { xi: f64 },

    #[error("eigenvalue collision in walk symbol at xi_k = {xi} (k = {k})")]
    DegenerateSymbol { k: i64, xi: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("negative fractional power applied to a field with nonzero zero mode")]
    AnnihilatorInverse,

    #[error("pair ({p}, {q}) is not {kind} admissible")]
    NotAdmissible { p: String, q: String, kind: String },

    #[error("time t = 0 is excluded from dispersive ratios")]
    ZeroTime,

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),

    #[error("missing Duhamel slice at step {0}")]
    MissingSlice(u64),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
