use thiserror::Error;

/// Errors produced while building, validating or certifying ROCN matrices.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("matrix is not ROCN (row residual {row_residual:e}, column residual {column_residual:e}, zero rows {zero_rows:?})")]
    NotRocn {
        row_residual: f64,
        column_residual: f64,
        zero_rows: Vec<usize>,
    },

    #[error("m = {0} is odd; only even m is supported")]
    OddM(usize),

    #[error("m must be even, got {0}")]
    MustBeEven(usize),

    #[error("m = {m} is outside the supported range {min}..={max}")]
    OutOfRange { m: usize, min: usize, max: usize },

    #[error("index {index} out of range 1..={max}")]
    Index { index: usize, max: usize },

    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("value {value} at ({row}, {col}) lies outside [-1, 1]")]
    OutOfUnitInterval { row: usize, col: usize, value: f64 },

    #[error("witness has non-zero diagonal entry {value:e} at position {index}")]
    NonNullDiagonal { index: usize, value: f64 },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("vector {index} is not unit norm (norm {norm})")]
    NotUnit { index: usize, norm: f64 },

    #[error("canonical Bell value {value} misses the quantum bound {bound} by {residual:e}")]
    BoundNotAttained {
        value: f64,
        bound: f64,
        residual: f64,
    },

    #[error("tolerance must be positive and finite, got {0}")]
    Tolerance(f64),

    #[error("m = {m} exceeds the enumeration guard {max}")]
    TooLarge { m: usize, max: usize },

    #[error("malformed matrix file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
