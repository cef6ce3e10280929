//! Batched Orthogonal Matching Pursuit sparse recovery.
//!
//! Three solver cores of increasing sophistication sit on top of a small set
//! of layout-aware dense kernels:
//!
//! * [`naive::run_naive`] — the classic greedy loop with incremental
//!   workspace growth; the normal-equation factorization is either redone
//!   per iteration or extended by one Cholesky column
//!   ([`options::FactorStrategy`]).
//! * [`v0::run_v0`] — maintains the inverse Cholesky factor and a projection
//!   table so each iteration updates all atom correlations with one
//!   matrix-vector product and never forms the residual.
//! * [`oracle::omp_reference`] / [`oracle::exhaustive_best_support`] —
//!   deliberately plain reference implementations used as ground truth.
//!
//! All cores solve each batch element independently against one shared
//! read-only dictionary and agree on supports and coefficients up to
//! round-off; the test suites hold them to that.

pub mod batch;
pub mod batched;
pub mod cholesky;
pub mod dictionary;
pub mod error;
pub mod gram;
pub mod matrix;
pub mod naive;
pub mod options;
pub mod oracle;
pub mod packed;
pub mod v0;

mod vecops;

pub use batch::{check_stop, RecoveryFlag, RecoveryResult, StopCheck};
pub use batched::{batched_abs_argmax, flatten_batched_product};
pub use cholesky::{cholesky_append, cholesky_factor, triangular_solve, CholeskyState, SolveMode};
pub use dictionary::{normalize_columns, NormalizationRecord, PreparedDictionary};
pub use error::{OmpError, Result};
pub use gram::GramTable;
pub use matrix::{DenseMatrix, Layout};
pub use naive::run_naive;
pub use options::{FactorStrategy, MeasurementBatch, SolverOptions};
pub use oracle::{exhaustive_best_support, omp_reference, OracleReport};
pub use packed::{pack_index, PackedUpperTriangular};
pub use v0::{run_v0, V0Session};
