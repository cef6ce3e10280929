//! Dictionary normalization and the solver-ready dictionary form.
//!
//! Selection scores correlations of unit-norm atoms, so dictionaries are
//! normalized up front and recovered coefficients are rescaled back to the
//! caller's column scaling at the end (each coefficient divided by the
//! original column norm). The prepared form stores the transpose row-
//! contiguously: every atom is one contiguous line of memory, which serves
//! both atom gathers and the batched correlation product.

use crate::error::{OmpError, Result};
use crate::matrix::{DenseMatrix, Layout};
use crate::vecops::norm;

/// Column norms recorded before normalization, for coefficient rescaling.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationRecord {
    column_norms: Vec<f64>,
    was_normalized: bool,
}

impl NormalizationRecord {
    pub fn column_norms(&self) -> &[f64] {
        &self.column_norms
    }

    pub fn was_normalized(&self) -> bool {
        self.was_normalized
    }

    /// Maps a coefficient for normalized column `n` back to the original
    /// column scaling.
    #[inline]
    pub fn rescale(&self, column: usize, coefficient: f64) -> f64 {
        coefficient / self.column_norms[column]
    }
}

/// Scales every column of `dict` to unit Euclidean norm, recording the
/// original norms. A zero-norm column is rejected by index.
pub fn normalize_columns(dict: &DenseMatrix) -> Result<(DenseMatrix, NormalizationRecord)> {
    let m = dict.rows();
    let n = dict.cols();
    let mut data = Vec::with_capacity(m * n);
    let mut norms = Vec::with_capacity(n);
    let mut col = Vec::with_capacity(m);
    for j in 0..n {
        dict.copy_column_into(j, &mut col);
        let nrm = norm(&col);
        if nrm.is_nan() || nrm <= 0.0 {
            return Err(OmpError::ZeroNormColumn { column: j });
        }
        norms.push(nrm);
        data.extend(col.iter().map(|&v| v / nrm));
    }
    let normalized = DenseMatrix::new(m, n, Layout::ColContiguous, data)?;
    Ok((normalized, NormalizationRecord { column_norms: norms, was_normalized: true }))
}

/// Dictionary in the layout the cores consume: atoms as contiguous rows of
/// the transpose, unit-norm, with the rescaling record attached. Shared
/// read-only across a batch.
#[derive(Debug, Clone)]
pub struct PreparedDictionary {
    /// `N x M` row-contiguous transpose; row `n` is atom `n`.
    transpose: DenseMatrix,
    record: NormalizationRecord,
}

/// Tolerance for accepting caller-supplied columns as already unit-norm.
const UNIT_NORM_TOL: f64 = 1e-6;

impl PreparedDictionary {
    /// Builds the solver form of an `M x N` dictionary. With `normalize`
    /// set, columns are scaled to unit norm and the scaling recorded;
    /// otherwise every column must already be unit-norm.
    pub fn new(dict: &DenseMatrix, normalize: bool) -> Result<Self> {
        let m = dict.rows();
        let n = dict.cols();
        if m == 0 || n == 0 {
            return Err(OmpError::InvalidInput("dictionary must be non-empty".into()));
        }
        let mut data = Vec::with_capacity(m * n);
        let mut norms = Vec::with_capacity(n);
        let mut col = Vec::with_capacity(m);
        for j in 0..n {
            dict.copy_column_into(j, &mut col);
            let nrm = norm(&col);
            if nrm.is_nan() || nrm <= 0.0 {
                return Err(OmpError::ZeroNormColumn { column: j });
            }
            if normalize {
                norms.push(nrm);
                data.extend(col.iter().map(|&v| v / nrm));
            } else {
                if (nrm - 1.0).abs() > UNIT_NORM_TOL {
                    return Err(OmpError::NotUnitNorm { column: j, norm: nrm });
                }
                norms.push(1.0);
                data.extend_from_slice(&col);
            }
        }
        let transpose = DenseMatrix::new(n, m, Layout::RowContiguous, data)?;
        Ok(Self {
            transpose,
            record: NormalizationRecord { column_norms: norms, was_normalized: normalize },
        })
    }

    pub fn measurement_len(&self) -> usize {
        self.transpose.cols()
    }

    pub fn atom_count(&self) -> usize {
        self.transpose.rows()
    }

    /// Atom `n` as a contiguous slice of length `M`.
    #[inline]
    pub fn atom(&self, n: usize) -> &[f64] {
        let m = self.transpose.cols();
        &self.transpose.data()[n * m..(n + 1) * m]
    }

    /// The `N x M` transpose consumed by the batched correlation product.
    pub fn transpose(&self) -> &DenseMatrix {
        &self.transpose
    }

    pub fn record(&self) -> &NormalizationRecord {
        &self.record
    }
}
