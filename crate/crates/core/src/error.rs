use thiserror::Error;

/// Error type shared across the library.
#[derive(Debug, Error)]
pub enum FramError {
    /// Operand shapes do not conform.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A square matrix was required.
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    /// NaN or infinity encountered where finite values are required.
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    /// A nonnegative matrix was required.
    #[error("negative entry {value} at ({row}, {col})")]
    Negative { row: usize, col: usize, value: f64 },

    /// Edge attribute matrices must be symmetric.
    #[error("matrix is not symmetric at ({row}, {col}): {lhs} vs {rhs}")]
    NotSymmetric { row: usize, col: usize, lhs: f64, rhs: f64 },

    /// Empty or all-zero problem data.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A brute-force routine was asked to exceed its budget.
    #[error("size {n} exceeds budget {max}")]
    SizeLimit { n: usize, max: usize },

    /// A value fell outside a floating-point format's exponent range.
    #[error("value {value} overflows the exponent range of {format}")]
    Range { value: f64, format: &'static str },

    /// A permutation matrix was required.
    #[error("not a permutation matrix: {0}")]
    NotPermutation(String),

    /// Malformed CSV or JSON input.
    #[error("parse error: {0}")]
    Parse(String),

    /// Invalid solver or projection configuration.
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, FramError>;
