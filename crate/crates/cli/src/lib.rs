//! Harness around the batched OMP cores: synthetic problem generation,
//! wall-clock benchmarking with CSV output, residual-based classification,
//! and matrix file I/O. The `omp` binary exposes these as subcommands.

pub mod bench;
pub mod classify;
pub mod error;
pub mod io;
pub mod problem;

pub use bench::{run_benchmark, solve_batch, Algorithm, BenchConfig, BenchOutcome, BenchRecord};
pub use classify::classify_by_residual;
pub use error::{CliError, Result};
pub use io::{load_labels, load_matrix, save_labels, save_matrix};
pub use problem::{generate_problem, GeneratedProblem, ProblemSpec};
