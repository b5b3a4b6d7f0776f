use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid tolerance {0}: expected 0 < tol < 1")]
    InvalidTolerance(f64),

    #[error("quadrature construction failed: {0}")]
    Quadrature(String),

    #[error("unsupported exponent {0}: only integer powers >= 1 are defined")]
    UnsupportedExponent(f64),

    #[error("grid size {0} is not a power of two >= 2")]
    GridSize(usize),

    #[error("aliasing: m_max = {m_max} must be below N/2 = {half}")]
    Aliasing { m_max: usize, half: usize },

    #[error("numerically dependent family: pivot {pivot:e} at index {index} is below {threshold:e}")]
    DependentFamily {
        index: usize,
        pivot: f64,
        threshold: f64,
    },

    #[error("insufficient nMax: |f_{index}| = {magnitude:e} exceeds the tail guard {guard:e}")]
    InsufficientOrder {
        index: usize,
        magnitude: f64,
        guard: f64,
    },

    #[error("grid not reflection-closed: no mirror point for x = {0}")]
    GridNotReflectionClosed(f64),

    #[error("determinant counterexample at m = {m} (family {family})")]
    Counterexample { family: char, m: usize },

    #[error("malformed input: {0}")]
    Input(String),

    #[error(transparent)]
    Csv(csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<csv::Error> for Error {
    /// Keeps I/O failures distinguishable from malformed records.
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            if let csv::ErrorKind::Io(io) = e.into_kind() {
                return Error::Io(io);
            }
            unreachable!("is_io_error implies an Io kind");
        }
        Error::Csv(e)
    }
}
