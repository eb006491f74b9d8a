use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("division by zero")]
    DivisionByZero,

    #[error("row is identically zero")]
    ZeroRow,

    #[error("diagonal entry {index} is {value}, must be positive")]
    InvalidDiagonal { index: usize, value: f64 },

    #[error("metric matrix is not positive definite (min eigenvalue {0:e})")]
    InvalidMetric(f64),

    #[error("matrix is not a contraction: eigenvalue {0:e} outside [0, 1]")]
    InvalidContraction(f64),

    #[error("matrices do not commute (commutator norm {0:e})")]
    NonCommuting(f64),

    #[error("invalid fit window: {0}")]
    InvalidWindow(String),

    #[error("truncation condition x < N + 2 violated (x = {x}, N = {order})")]
    InvalidTruncation { x: String, order: usize },

    #[error("inconsistent system: residual {residual:e} at reference solution")]
    Inconsistent { residual: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
