//! Residual-based classification over a labeled dictionary.
//!
//! Each test vector is sparse-coded against the full training dictionary;
//! the predicted class is the one whose selected atoms alone leave the
//! smallest residual. A class with no selected atoms contributes an infinite
//! residual, and exact ties break to the smallest class id.

use omp_core::{DenseMatrix, MeasurementBatch, SolverOptions};

use crate::bench::{solve_batch, Algorithm};
use crate::error::{CliError, Result};

/// Predicts one class label per test vector.
pub fn classify_by_residual(
    train: &DenseMatrix,
    labels: &[usize],
    test: &MeasurementBatch,
    sparsity: usize,
    algorithm: Algorithm,
) -> Result<Vec<usize>> {
    if labels.len() != train.cols() {
        return Err(CliError::Usage(format!(
            "need one label per training column: {} labels for {} columns",
            labels.len(),
            train.cols()
        )));
    }
    let mut classes: Vec<usize> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();

    let opts = SolverOptions::new(sparsity);
    let results = solve_batch(algorithm, train, test, &opts, None)?;

    let m = train.rows();
    let mut predictions = Vec::with_capacity(test.len());
    for (e, result) in results.iter().enumerate() {
        let y = test.element(e);
        let mut best_class = classes[0];
        let mut best_residual = f64::INFINITY;
        for &class in &classes {
            let selected: Vec<usize> = result
                .support
                .iter()
                .copied()
                .filter(|&atom| labels[atom] == class)
                .collect();
            if selected.is_empty() {
                continue;
            }
            let mut residual_sq = 0.0;
            for i in 0..m {
                let mut fitted = 0.0;
                for &atom in &selected {
                    fitted += result.coefficients[atom] * train.get(i, atom);
                }
                let r = y[i] - fitted;
                residual_sq += r * r;
            }
            if residual_sq < best_residual {
                best_residual = residual_sq;
                best_class = class;
            }
        }
        predictions.push(best_class);
    }
    Ok(predictions)
}
