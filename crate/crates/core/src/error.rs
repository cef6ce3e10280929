//! Error type shared by the kernels and solver cores.

use std::fmt;

/// Errors raised by kernels, solver cores, and batch control.
#[derive(Debug, Clone, PartialEq)]
pub enum OmpError {
    /// Matrix/vector dimensions do not conform.
    ShapeMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    /// Packed triangular addressing outside the upper triangle or capacity.
    PackedIndex { row: usize, col: usize, capacity: usize },
    /// A Cholesky pivot was not positive, or a rank extension was numerically
    /// dependent on the already-selected columns. `order` is the zero-based
    /// pivot/extension index at which factorization failed.
    RankDeficient { order: usize },
    /// Zero diagonal hit during a triangular solve; a valid factor cannot
    /// produce this, so it signals state corruption.
    ZeroDiagonal { index: usize },
    /// Dictionary column with zero Euclidean norm.
    ZeroNormColumn { column: usize },
    /// Dictionary column expected to be unit-norm was not.
    NotUnitNorm { column: usize, norm: f64 },
    /// NaN encountered in correlation values; selection would be meaningless.
    NanCorrelation { batch: usize, index: usize },
    /// Solver options outside their documented domain.
    InvalidOptions(String),
    /// Invalid input data (shapes are covered by `ShapeMismatch`).
    InvalidInput(String),
    /// An atom was selected twice by the same element; driver-level logic error.
    DuplicateAtom { atom: usize },
    /// A result slot was captured twice; driver-level logic error.
    DoubleCapture { index: usize },
    /// A batch finished without capturing every element.
    MissingResult { index: usize },
    /// Workspace allocation failed or exceeds the budget. `bytes` is the
    /// asymptotic estimate for the inputs, Gramian, and projection table.
    MemoryBudget { bytes: usize, detail: String },
}

impl fmt::Display for OmpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ShapeMismatch { context, expected, got } => {
                write!(f, "{context}: expected length {expected}, got {got}")
            }
            Self::PackedIndex { row, col, capacity } => write!(
                f,
                "packed index ({row},{col}) outside upper triangle of capacity {capacity}"
            ),
            Self::RankDeficient { order } => {
                write!(f, "rank-deficient system at order {order}")
            }
            Self::ZeroDiagonal { index } => {
                write!(f, "zero diagonal at index {index} during triangular solve")
            }
            Self::ZeroNormColumn { column } => {
                write!(f, "dictionary column {column} has zero norm")
            }
            Self::NotUnitNorm { column, norm } => write!(
                f,
                "dictionary column {column} has norm {norm} but normalization is disabled"
            ),
            Self::NanCorrelation { batch, index } => {
                write!(f, "NaN correlation for batch element {batch} at index {index}")
            }
            Self::InvalidOptions(msg) => write!(f, "invalid solver options: {msg}"),
            Self::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Self::DuplicateAtom { atom } => {
                write!(f, "atom {atom} extended into a workspace that already holds it")
            }
            Self::DoubleCapture { index } => {
                write!(f, "result for batch element {index} captured twice")
            }
            Self::MissingResult { index } => {
                write!(f, "batch finished without a result for element {index}")
            }
            Self::MemoryBudget { bytes, detail } => {
                write!(f, "workspace allocation of ~{bytes} bytes failed ({detail})")
            }
        }
    }
}

impl std::error::Error for OmpError {}

pub type Result<T> = std::result::Result<T, OmpError>;
