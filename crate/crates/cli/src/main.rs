//! `omp` command line: solve, bench, classify, gen.
//!
//! Exit codes: 0 on success, 2 on input/usage errors, 3 when `--strict`
//! solving hits numerical degeneracy.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use omp_cli::bench::{run_benchmark, solve_batch, Algorithm, BenchConfig, write_csv};
use omp_cli::classify::classify_by_residual;
use omp_cli::error::{CliError, Result};
use omp_cli::io::{load_labels, load_matrix, save_labels, save_matrix};
use omp_cli::problem::{generate_problem, ProblemSpec};
use omp_core::{DenseMatrix, MeasurementBatch, RecoveryFlag, SolverOptions};

#[derive(Parser)]
#[command(name = "omp", about = "Batched Orthogonal Matching Pursuit solvers and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sparse-code a batch of measurements against a dictionary.
    Solve(SolveArgs),
    /// Benchmark the solver cores over synthetic problems; writes CSV.
    Bench(BenchArgs),
    /// Classify test vectors by per-class residual of their sparse codes.
    Classify(ClassifyArgs),
    /// Generate a synthetic problem to files.
    Gen(GenArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Dictionary matrix file (M x N).
    #[arg(long)]
    dict: PathBuf,
    /// Measurement matrix file (B x M, one measurement per row).
    #[arg(long)]
    y: PathBuf,
    #[arg(long)]
    sparsity: usize,
    /// Residual 2-norm stopping tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Solver core: naive | naive-update | v0 | reference.
    #[arg(long, default_value = "naive")]
    alg: String,
    /// Require unit-norm dictionary columns instead of normalizing.
    #[arg(long)]
    no_normalize: bool,
    /// Precompute the full Gram table for the naive core.
    #[arg(long)]
    precompute_gram: bool,
    /// Exit with code 3 if any element degenerates numerically.
    #[arg(long)]
    strict: bool,
    /// Output coefficient matrix file (B x N).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated problem sizes M (N = 8M, S = M/4, e.g. 16,32,64).
    #[arg(long, value_delimiter = ',', required = true)]
    m: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    batch: usize,
    /// Timed repetitions per measurement (one warm-up run is discarded).
    #[arg(long, default_value_t = 3)]
    reps: usize,
    /// Comma-separated algorithms to time.
    #[arg(long, value_delimiter = ',', default_values_t = ["reference".to_string(), "naive".to_string(), "naive-update".to_string(), "v0".to_string()])]
    algs: Vec<String>,
    /// Output CSV path.
    #[arg(long)]
    csv: PathBuf,
    /// Pin the solver thread pool to one thread for stable comparisons.
    #[arg(long)]
    single_thread: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Training dictionary file (M x N, one column per training sample).
    #[arg(long)]
    train: PathBuf,
    /// Label file: one integer per training column.
    #[arg(long)]
    labels: PathBuf,
    /// Test matrix file (B x M).
    #[arg(long)]
    test: PathBuf,
    #[arg(long)]
    sparsity: usize,
    /// Solver core used for sparse coding.
    #[arg(long, default_value = "v0")]
    alg: String,
    /// Output label file: one predicted class per line.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    m: usize,
    /// Atom count (default 8M).
    #[arg(long)]
    n: Option<usize>,
    /// Sparsity (default M/4).
    #[arg(long)]
    s: Option<usize>,
    /// Batch size.
    #[arg(long, default_value_t = 100)]
    b: usize,
    /// Measurement noise level.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long)]
    seed: u64,
    /// Writes <prefix>_dict.bin, <prefix>_y.bin, <prefix>_xtrue.bin.
    #[arg(long)]
    out_prefix: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Gen(args) => cmd_gen(args),
    }
}

fn as_measurement_batch(matrix: &DenseMatrix) -> Result<MeasurementBatch> {
    let b = matrix.rows();
    let m = matrix.cols();
    let row_major = matrix.to_row_contiguous();
    Ok(MeasurementBatch::from_flat(b, m, row_major.data().to_vec())?)
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode> {
    let algorithm = Algorithm::parse(&args.alg)?;
    let dict = load_matrix(&args.dict)?;
    let measurements = as_measurement_batch(&load_matrix(&args.y)?)?;
    let mut opts = SolverOptions::new(args.sparsity)
        .with_normalize(!args.no_normalize)
        .with_precompute_gram(args.precompute_gram);
    if let Some(tol) = args.tol {
        opts = opts.with_tolerance(tol);
    }
    let results = solve_batch(algorithm, &dict, &measurements, &opts, None)?;

    let b = measurements.len();
    let n = dict.cols();
    let mut coefficients = Vec::with_capacity(b * n);
    for result in &results {
        coefficients.extend_from_slice(&result.coefficients);
    }
    save_matrix(&args.out, &DenseMatrix::from_row_major(b, n, coefficients)?)?;

    let degenerate = results.iter().filter(|r| r.flag == RecoveryFlag::Degenerate).count();
    let tol_reached = results.iter().filter(|r| r.flag == RecoveryFlag::TolReached).count();
    let max_residual =
        results.iter().map(|r| r.residual_norm).fold(0.0f64, f64::max);
    println!(
        "solved {b} elements with {}: {} ran to sparsity, {tol_reached} hit tolerance, \
         {degenerate} degenerate; max residual {max_residual:.3e}; coefficients -> {}",
        algorithm.label(),
        b - degenerate - tol_reached,
        args.out.display()
    );
    if args.strict && degenerate > 0 {
        eprintln!("strict mode: {degenerate} elements flagged degenerate");
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode> {
    if args.single_thread {
        rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool setup failed: {e}")))?;
    }
    let algorithms: Vec<Algorithm> =
        args.algs.iter().map(|a| Algorithm::parse(a)).collect::<Result<_>>()?;
    let config = BenchConfig {
        m_values: args.m.clone(),
        batch: args.batch,
        repetitions: args.reps,
        algorithms,
        seed: args.seed,
    };
    let outcome = run_benchmark(&config)?;
    for warning in &outcome.warnings {
        eprintln!("warning: {warning}");
    }
    let mut csv = Vec::new();
    write_csv(&outcome, &config, &mut csv)
        .map_err(|e| CliError::io(&args.csv, e))?;
    std::fs::write(&args.csv, &csv).map_err(|e| CliError::io(&args.csv, e))?;
    print!("{}", String::from_utf8_lossy(&csv));
    println!("wrote {}", args.csv.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_classify(args: ClassifyArgs) -> Result<ExitCode> {
    let algorithm = Algorithm::parse(&args.alg)?;
    let train = load_matrix(&args.train)?;
    let labels = load_labels(&args.labels)?;
    let test = as_measurement_batch(&load_matrix(&args.test)?)?;
    let predicted = classify_by_residual(&train, &labels, &test, args.sparsity, algorithm)?;
    save_labels(&args.out, &predicted)?;
    println!("classified {} vectors -> {}", predicted.len(), args.out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode> {
    let mut spec = ProblemSpec::from_m(args.m, args.seed);
    if let Some(n) = args.n {
        spec.n = n;
    }
    if let Some(s) = args.s {
        spec.s = s;
    }
    spec.b = args.b;
    spec.noise_sigma = args.noise;
    let problem = generate_problem(&spec)?;

    let dict_path = PathBuf::from(format!("{}_dict.bin", args.out_prefix));
    let y_path = PathBuf::from(format!("{}_y.bin", args.out_prefix));
    let x_path = PathBuf::from(format!("{}_xtrue.bin", args.out_prefix));
    save_matrix(&dict_path, &problem.dictionary)?;

    let b = problem.measurements.len();
    let m = problem.measurements.measurement_len();
    save_matrix(
        &y_path,
        &DenseMatrix::from_row_major(b, m, problem.measurements.data().to_vec())?,
    )?;
    let mut x_flat = Vec::with_capacity(b * spec.n);
    for x in &problem.true_coefficients {
        x_flat.extend_from_slice(x);
    }
    save_matrix(&x_path, &DenseMatrix::from_row_major(b, spec.n, x_flat)?)?;
    println!(
        "generated M={} N={} S={} B={} sigma={} seed={}:\n  {}\n  {}\n  {}",
        spec.m,
        spec.n,
        spec.s,
        spec.b,
        spec.noise_sigma,
        spec.seed,
        dict_path.display(),
        y_path.display(),
        x_path.display()
    );
    Ok(ExitCode::SUCCESS)
}
