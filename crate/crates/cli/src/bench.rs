//! Wall-clock benchmarking of the solver cores with a correctness gate.
//!
//! Per problem size the same generated instance is handed to every
//! algorithm; each timed run is preceded by a cross-check of a subsample of
//! elements against the reference solver, so a fast-but-wrong core fails
//! loudly instead of reporting a time. Timing takes the median over the
//! configured repetitions after one discarded warm-up run. The v0 Gram
//! precompute is timed once per problem size and reported as its own CSV
//! column, since it is shareable across batches.

use std::io::Write;
use std::time::Instant;

use omp_core::{
    omp_reference, run_naive, DenseMatrix, FactorStrategy, MeasurementBatch, RecoveryResult,
    SolverOptions, V0Session,
};

use crate::error::{CliError, Result};
use crate::problem::{generate_problem, GeneratedProblem, ProblemSpec};

/// Solver selection shared by the CLI subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Reference,
    Naive,
    NaiveUpdate,
    V0,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] =
        [Algorithm::Reference, Algorithm::Naive, Algorithm::NaiveUpdate, Algorithm::V0];

    pub fn label(&self) -> &'static str {
        match self {
            Self::Reference => "reference",
            Self::Naive => "naive",
            Self::NaiveUpdate => "naive-update",
            Self::V0 => "v0",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "reference" => Ok(Self::Reference),
            "naive" => Ok(Self::Naive),
            "naive-update" => Ok(Self::NaiveUpdate),
            "v0" => Ok(Self::V0),
            other => Err(CliError::Usage(format!(
                "unknown algorithm {other:?} (expected naive|naive-update|v0|reference)"
            ))),
        }
    }
}

/// Runs one algorithm over a whole batch within an optional prebuilt v0
/// session (so its Gram precompute can be timed separately).
pub fn solve_batch(
    algorithm: Algorithm,
    dict: &DenseMatrix,
    batch: &MeasurementBatch,
    opts: &SolverOptions,
    v0_session: Option<&V0Session>,
) -> Result<Vec<RecoveryResult>> {
    let results = match algorithm {
        Algorithm::Reference => {
            // Sequential per-element textbook solves.
            let mut out = Vec::with_capacity(batch.len());
            for e in 0..batch.len() {
                let tol = batch.effective_tolerance(e, opts);
                let report = omp_reference(dict, batch.element(e), opts.sparsity, tol)?;
                let iterations = report.support.len();
                out.push(report.to_recovery_result(iterations));
            }
            out
        }
        Algorithm::Naive => {
            run_naive(dict, batch, &opts.clone().with_strategy(FactorStrategy::Refactor))?
        }
        Algorithm::NaiveUpdate => {
            run_naive(dict, batch, &opts.clone().with_strategy(FactorStrategy::Update))?
        }
        Algorithm::V0 => match v0_session {
            Some(session) => session.run(batch, opts)?,
            None => omp_core::run_v0(dict, batch, opts)?,
        },
    };
    Ok(results)
}

#[derive(Debug, Clone)]
pub struct BenchRecord {
    pub algorithm: Algorithm,
    pub m: usize,
    pub wall_seconds: f64,
    pub max_residual_norm: f64,
    pub supports_match_reference: bool,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub m_values: Vec<usize>,
    pub batch: usize,
    pub repetitions: usize,
    pub algorithms: Vec<Algorithm>,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            m_values: vec![16, 32, 64],
            batch: 100,
            repetitions: 3,
            algorithms: Algorithm::ALL.to_vec(),
            seed: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchOutcome {
    pub records: Vec<BenchRecord>,
    /// Gram precompute seconds per problem size (when v0 is benchmarked).
    pub gram_seconds: Vec<(usize, f64)>,
    pub warnings: Vec<String>,
}

/// Elements cross-checked against the reference before each timed run.
const GATE_SAMPLE: usize = 4;

fn check_against_reference(
    dict: &DenseMatrix,
    batch: &MeasurementBatch,
    opts: &SolverOptions,
    results: &[RecoveryResult],
    label: &str,
) -> Result<()> {
    for e in 0..batch.len().min(GATE_SAMPLE) {
        let reference = omp_reference(dict, batch.element(e), opts.sparsity, None)?;
        let got = &results[e];
        if got.support != reference.support {
            return Err(CliError::Usage(format!(
                "correctness gate failed: {label} support {:?} != reference {:?} on element {e}",
                got.support, reference.support
            )));
        }
        let max_diff = got
            .coefficients
            .iter()
            .zip(&reference.coefficients)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        if max_diff > 1e-8 {
            return Err(CliError::Usage(format!(
                "correctness gate failed: {label} coefficients deviate by {max_diff} on element {e}"
            )));
        }
    }
    Ok(())
}

fn median(mut times: Vec<f64>) -> f64 {
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = times.len();
    if n % 2 == 1 {
        times[n / 2]
    } else {
        0.5 * (times[n / 2 - 1] + times[n / 2])
    }
}

/// Benchmarks every configured algorithm at every problem size.
pub fn run_benchmark(config: &BenchConfig) -> Result<BenchOutcome> {
    if config.algorithms.is_empty() || config.m_values.is_empty() {
        return Err(CliError::Usage("need at least one algorithm and one problem size".into()));
    }
    if config.repetitions == 0 {
        return Err(CliError::Usage("need at least one repetition".into()));
    }
    let mut records = Vec::new();
    let mut gram_seconds = Vec::new();
    let mut warnings = Vec::new();
    for &m in &config.m_values {
        let mut spec = ProblemSpec::from_m(m, config.seed);
        spec.b = config.batch;
        let GeneratedProblem { dictionary, measurements, .. } = generate_problem(&spec)?;
        let opts = SolverOptions::new(spec.s);

        let v0_session = if config.algorithms.contains(&Algorithm::V0) {
            let start = Instant::now();
            let session = V0Session::new(&dictionary, true)?;
            gram_seconds.push((m, start.elapsed().as_secs_f64()));
            Some(session)
        } else {
            None
        };

        for &algorithm in &config.algorithms {
            // Correctness gate before any timing is reported.
            let gated =
                solve_batch(algorithm, &dictionary, &measurements, &opts, v0_session.as_ref())?;
            check_against_reference(
                &dictionary,
                &measurements,
                &opts,
                &gated,
                algorithm.label(),
            )?;

            // One warm-up (the gate run above), then timed repetitions.
            let mut times = Vec::with_capacity(config.repetitions);
            let mut max_residual: f64 = 0.0;
            for _ in 0..config.repetitions {
                let start = Instant::now();
                let results = solve_batch(
                    algorithm,
                    &dictionary,
                    &measurements,
                    &opts,
                    v0_session.as_ref(),
                )?;
                times.push(start.elapsed().as_secs_f64());
                max_residual = results
                    .iter()
                    .map(|r| r.residual_norm)
                    .fold(max_residual, f64::max);
            }
            let wall_seconds = median(times).max(f64::MIN_POSITIVE);
            if wall_seconds < 1e-3 {
                warnings.push(format!(
                    "{} at M={m}: median {wall_seconds:.2e}s is below timer resolution comfort (1ms)",
                    algorithm.label()
                ));
            }
            records.push(BenchRecord {
                algorithm,
                m,
                wall_seconds,
                max_residual_norm: max_residual,
                supports_match_reference: true,
            });
        }
    }
    Ok(BenchOutcome { records, gram_seconds, warnings })
}

/// One CSV row per problem size, one column per algorithm, plus the Gram
/// precompute column.
pub fn write_csv(outcome: &BenchOutcome, config: &BenchConfig, out: &mut dyn Write) -> std::io::Result<()> {
    write!(out, "m")?;
    for algorithm in &config.algorithms {
        write!(out, ",{}", algorithm.label())?;
    }
    writeln!(out, ",gram_precompute")?;
    for &m in &config.m_values {
        write!(out, "{m}")?;
        for &algorithm in &config.algorithms {
            let record = outcome
                .records
                .iter()
                .find(|r| r.m == m && r.algorithm == algorithm)
                .expect("record for every (m, algorithm) pair");
            write!(out, ",{:.6}", record.wall_seconds)?;
        }
        match outcome.gram_seconds.iter().find(|(gm, _)| *gm == m) {
            Some((_, secs)) => writeln!(out, ",{secs:.6}")?,
            None => writeln!(out, ",")?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_labels_round_trip() {
        for algorithm in Algorithm::ALL {
            assert_eq!(Algorithm::parse(algorithm.label()).unwrap(), algorithm);
        }
        assert!(Algorithm::parse("qr").is_err());
    }

    #[test]
    fn single_size_single_algorithm_yields_one_row() {
        let config = BenchConfig {
            m_values: vec![8],
            batch: 3,
            repetitions: 3,
            algorithms: vec![Algorithm::Naive],
            seed: 2,
        };
        let outcome = run_benchmark(&config).unwrap();
        assert_eq!(outcome.records.len(), 1);
        assert!(outcome.records[0].wall_seconds > 0.0);
        assert!(outcome.records[0].supports_match_reference);

        let mut csv = Vec::new();
        write_csv(&outcome, &config, &mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "m,naive,gram_precompute");
        let row = lines.next().unwrap();
        assert!(row.starts_with("8,"));
        assert!(row.ends_with(','), "no gram column expected: {row}");
        assert!(lines.next().is_none());
    }

    #[test]
    fn v0_benchmark_reports_gram_column() {
        let config = BenchConfig {
            m_values: vec![8],
            batch: 2,
            repetitions: 1,
            algorithms: vec![Algorithm::V0],
            seed: 3,
        };
        let outcome = run_benchmark(&config).unwrap();
        assert_eq!(outcome.gram_seconds.len(), 1);
        let mut csv = Vec::new();
        write_csv(&outcome, &config, &mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.lines().nth(1).unwrap().split(',').count() == 3);
    }

    #[test]
    fn all_algorithms_pass_the_gate_on_one_instance() {
        let config = BenchConfig {
            m_values: vec![8],
            batch: 2,
            repetitions: 1,
            algorithms: Algorithm::ALL.to_vec(),
            seed: 4,
        };
        let outcome = run_benchmark(&config).unwrap();
        assert_eq!(outcome.records.len(), 4);
    }
}
