//! Slow, transparent reference solvers used as ground truth.
//!
//! `omp_reference` is the textbook greedy pursuit with a dense least-squares
//! solve from scratch every iteration; `exhaustive_best_support` enumerates
//! every size-`S` support on tiny instances. Neither shares any numerical
//! code with the optimized cores: every loop here is written out plainly so
//! cross-checks are meaningful.

use crate::batch::{RecoveryFlag, RecoveryResult};
use crate::error::{OmpError, Result};
use crate::matrix::DenseMatrix;

/// Output of a reference solve.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    /// Atom indices in selection order (exhaustive mode: ascending).
    pub support: Vec<usize>,
    /// Full-length sparse coefficients in the caller's column scaling.
    pub coefficients: Vec<f64>,
    /// Final `||y - A x||`.
    pub residual_norm: f64,
    /// Same as `residual_norm`; named for the exhaustive-search objective.
    pub objective: f64,
    pub flag: RecoveryFlag,
}

impl OracleReport {
    /// View as the common per-element result type.
    pub fn to_recovery_result(&self, iterations: usize) -> RecoveryResult {
        RecoveryResult {
            coefficients: self.coefficients.clone(),
            support: self.support.clone(),
            residual_norm: self.residual_norm,
            iterations,
            flag: self.flag,
        }
    }
}

/// Residual level treated as numerically zero, relative to `||y||`; matches
/// the optimized cores so support sequences stay comparable.
const IMPLICIT_STOP_REL: f64 = 1e-13;

fn column_of(dict: &DenseMatrix, j: usize) -> Vec<f64> {
    (0..dict.rows()).map(|i| dict.get(i, j)).collect()
}

/// Plain Gaussian elimination with partial pivoting; `None` on a singular
/// system.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_abs = a[col][col].abs();
        for row in col + 1..n {
            if a[row][col].abs() > pivot_abs {
                pivot_abs = a[row][col].abs();
                pivot_row = row;
            }
        }
        if pivot_abs < 1e-12 {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for j in col..n {
                a[row][j] -= factor * a[col][j];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in i + 1..n {
            s -= a[i][j] * x[j];
        }
        x[i] = s / a[i][i];
    }
    Some(x)
}

/// Least squares on the listed columns via dense normal equations; returns
/// the coefficients and the residual norm.
fn least_squares_on(dict: &DenseMatrix, y: &[f64], support: &[usize]) -> Option<(Vec<f64>, f64)> {
    let m = dict.rows();
    let k = support.len();
    let columns: Vec<Vec<f64>> = support.iter().map(|&j| column_of(dict, j)).collect();
    let mut gram = vec![vec![0.0; k]; k];
    let mut rhs = vec![0.0; k];
    for i in 0..k {
        for j in 0..k {
            let mut s = 0.0;
            for row in 0..m {
                s += columns[i][row] * columns[j][row];
            }
            gram[i][j] = s;
        }
        let mut s = 0.0;
        for row in 0..m {
            s += columns[i][row] * y[row];
        }
        rhs[i] = s;
    }
    let x = solve_dense(gram, rhs)?;
    let mut residual_sq = 0.0;
    for row in 0..m {
        let mut fitted = 0.0;
        for (i, col) in columns.iter().enumerate() {
            fitted += x[i] * col[row];
        }
        let r = y[row] - fitted;
        residual_sq += r * r;
    }
    Some((x, residual_sq.sqrt()))
}

/// Textbook OMP: per iteration, scan all columns for the largest
/// `|<r, a_n>| / ||a_n||` (ties to the lowest index), then recompute the
/// dense least-squares fit on the selected columns from scratch. Stops at
/// `sparsity` atoms, at `tolerance`, or when the residual is numerically
/// zero; a singular normal system flags the element degenerate with the
/// previous iteration's fit.
pub fn omp_reference(
    dict: &DenseMatrix,
    y: &[f64],
    sparsity: usize,
    tolerance: Option<f64>,
) -> Result<OracleReport> {
    let m = dict.rows();
    let n = dict.cols();
    if y.len() != m {
        return Err(OmpError::ShapeMismatch {
            context: "omp_reference measurement",
            expected: m,
            got: y.len(),
        });
    }
    if sparsity == 0 || sparsity > m {
        return Err(OmpError::InvalidOptions(format!(
            "sparsity {sparsity} outside 1..={m}"
        )));
    }
    let norms: Vec<f64> = (0..n)
        .map(|j| {
            let col = column_of(dict, j);
            col.iter().map(|v| v * v).sum::<f64>().sqrt()
        })
        .collect();
    if let Some(j) = norms.iter().position(|&v| v == 0.0) {
        return Err(OmpError::ZeroNormColumn { column: j });
    }
    let y_norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();

    let mut support: Vec<usize> = Vec::new();
    let mut coefficients: Vec<f64> = Vec::new();
    let mut residual = y.to_vec();
    let mut residual_norm = y_norm;
    let flag;
    loop {
        if let Some(eps) = tolerance {
            if residual_norm <= eps {
                flag = RecoveryFlag::TolReached;
                break;
            }
        }
        if support.len() >= sparsity {
            flag = RecoveryFlag::Completed;
            break;
        }
        if residual_norm <= IMPLICIT_STOP_REL * y_norm {
            flag = RecoveryFlag::TolReached;
            break;
        }
        let mut best = 0usize;
        let mut best_score = -1.0;
        for j in 0..n {
            let mut corr = 0.0;
            for i in 0..m {
                corr += dict.get(i, j) * residual[i];
            }
            let score = corr.abs() / norms[j];
            if score > best_score {
                best_score = score;
                best = j;
            }
        }
        if support.contains(&best) {
            flag = RecoveryFlag::Degenerate;
            break;
        }
        support.push(best);
        match least_squares_on(dict, y, &support) {
            Some((x, rnorm)) => {
                coefficients = x;
                residual_norm = rnorm;
                for i in 0..m {
                    let mut fitted = 0.0;
                    for (idx, &atom) in support.iter().enumerate() {
                        fitted += coefficients[idx] * dict.get(i, atom);
                    }
                    residual[i] = y[i] - fitted;
                }
            }
            None => {
                support.pop();
                flag = RecoveryFlag::Degenerate;
                break;
            }
        }
    }
    let mut sparse = vec![0.0; n];
    for (idx, &atom) in support.iter().enumerate() {
        sparse[atom] = coefficients[idx];
    }
    Ok(OracleReport {
        support,
        coefficients: sparse,
        residual_norm,
        objective: residual_norm,
        flag,
    })
}

/// Hard ceiling on the number of candidate supports the exhaustive search
/// will enumerate.
pub const EXHAUSTIVE_BUDGET: u128 = 1_000_000;

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Enumerates every size-`sparsity` support in lexicographic order, solves
/// the dense least squares for each, and returns the minimizer of
/// `||A x - y||` (exact ties keep the lexicographically smallest support).
pub fn exhaustive_best_support(
    dict: &DenseMatrix,
    y: &[f64],
    sparsity: usize,
) -> Result<OracleReport> {
    let m = dict.rows();
    let n = dict.cols();
    if y.len() != m {
        return Err(OmpError::ShapeMismatch {
            context: "exhaustive_best_support measurement",
            expected: m,
            got: y.len(),
        });
    }
    if sparsity == 0 || sparsity > n {
        return Err(OmpError::InvalidOptions(format!(
            "support size {sparsity} outside 1..={n}"
        )));
    }
    let count = binomial(n, sparsity);
    if count > EXHAUSTIVE_BUDGET {
        return Err(OmpError::InvalidOptions(format!(
            "refusing exhaustive search over {count} supports (budget {EXHAUSTIVE_BUDGET})"
        )));
    }
    let mut best: Option<(Vec<usize>, Vec<f64>, f64)> = None;
    let mut candidate: Vec<usize> = (0..sparsity).collect();
    loop {
        if let Some((x, objective)) = least_squares_on(dict, y, &candidate) {
            let better = match &best {
                None => true,
                Some((_, _, best_obj)) => objective < *best_obj,
            };
            if better {
                best = Some((candidate.clone(), x, objective));
            }
        }
        // Advance to the next combination in lexicographic order.
        let mut i = sparsity;
        while i > 0 && candidate[i - 1] == (i - 1) + n - sparsity {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        candidate[i - 1] += 1;
        for j in i..sparsity {
            candidate[j] = candidate[j - 1] + 1;
        }
    }
    let (support, x, objective) = best.ok_or_else(|| {
        OmpError::InvalidInput("every candidate support was singular".into())
    })?;
    let mut sparse = vec![0.0; n];
    for (idx, &atom) in support.iter().enumerate() {
        sparse[atom] = x[idx];
    }
    Ok(OracleReport {
        support,
        coefficients: sparse,
        residual_norm: objective,
        objective,
        flag: RecoveryFlag::Completed,
    })
}
