//! Synthetic sparse-recovery problem generation.
//!
//! The benchmark configuration follows the wide-dictionary convention: `M`
//! measurements against `N = 8M` atoms, sparsity `S = M/4`, batch size 100.
//! Dictionary entries are i.i.d. standard normal with columns normalized;
//! each batch element gets a uniformly random size-`S` support with standard
//! normal coefficients and `y = A x + sigma * noise`. Everything is a pure
//! function of the seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use omp_core::{DenseMatrix, MeasurementBatch};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    /// Measurement count `M`.
    pub m: usize,
    /// Atom count `N` (default `8M`).
    pub n: usize,
    /// Sparsity `S` (default `M/4`, at least 1).
    pub s: usize,
    /// Batch size `B` (default 100).
    pub b: usize,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl ProblemSpec {
    /// Benchmark defaults derived from `m` alone.
    pub fn from_m(m: usize, seed: u64) -> Self {
        Self { m, n: 8 * m, s: (m / 4).max(1), b: 100, noise_sigma: 0.0, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.b == 0 {
            return Err(CliError::Usage("problem sizes must be positive".into()));
        }
        if !(self.s >= 1 && self.s <= self.m && self.m <= self.n) {
            return Err(CliError::Usage(format!(
                "require 1 <= S <= M <= N, got S={}, M={}, N={}",
                self.s, self.m, self.n
            )));
        }
        if self.noise_sigma.is_nan() || self.noise_sigma < 0.0 {
            return Err(CliError::Usage(format!(
                "noise sigma must be non-negative, got {}",
                self.noise_sigma
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedProblem {
    /// `M x N` dictionary with unit-norm columns (column-contiguous).
    pub dictionary: DenseMatrix,
    /// `B` measurement vectors.
    pub measurements: MeasurementBatch,
    /// Ground-truth supports, ascending per element.
    pub true_supports: Vec<Vec<usize>>,
    /// Ground-truth coefficients, full length `N` per element.
    pub true_coefficients: Vec<Vec<f64>>,
}

/// Deterministic problem synthesis from the spec's seed.
pub fn generate_problem(spec: &ProblemSpec) -> Result<GeneratedProblem> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (m, n, s, b) = (spec.m, spec.n, spec.s, spec.b);

    let mut dict_data = Vec::with_capacity(m * n);
    for _ in 0..n {
        let start = dict_data.len();
        for _ in 0..m {
            dict_data.push(rng.sample::<f64, _>(StandardNormal));
        }
        let col = &mut dict_data[start..];
        let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(CliError::Usage("degenerate zero dictionary column drawn".into()));
        }
        for v in col {
            *v /= norm;
        }
    }
    let dictionary = DenseMatrix::from_col_major(m, n, dict_data)?;

    let mut measurements = Vec::with_capacity(b * m);
    let mut true_supports = Vec::with_capacity(b);
    let mut true_coefficients = Vec::with_capacity(b);
    for _ in 0..b {
        let mut support = rand::seq::index::sample(&mut rng, n, s).into_vec();
        support.sort_unstable();
        let mut coefficients = vec![0.0; n];
        let mut y = vec![0.0; m];
        for &atom in &support {
            let coeff: f64 = rng.sample(StandardNormal);
            coefficients[atom] = coeff;
            let col = dictionary.column(atom).expect("column-contiguous by construction");
            for (yi, &a) in y.iter_mut().zip(col) {
                *yi += coeff * a;
            }
        }
        if spec.noise_sigma > 0.0 {
            for yi in &mut y {
                *yi += spec.noise_sigma * rng.sample::<f64, _>(StandardNormal);
            }
        }
        measurements.extend_from_slice(&y);
        true_supports.push(support);
        true_coefficients.push(coefficients);
    }
    Ok(GeneratedProblem {
        dictionary,
        measurements: MeasurementBatch::from_flat(b, m, measurements)?,
        true_supports,
        true_coefficients,
    })
}
