//! Solver configuration and the batched measurement container.

use crate::error::{OmpError, Result};

/// How the naive core keeps the normal-equation factorization current.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorStrategy {
    /// Factorize the packed Gram from scratch every iteration, O(k^3).
    Refactor,
    /// Extend the previous factor by one column per iteration, O(k^2).
    Update,
}

/// Options shared by the solver cores.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Sparsity target `S`: maximum number of selected atoms.
    pub sparsity: usize,
    /// Optional residual 2-norm threshold; iteration stops at the first `k`
    /// with `||r_k|| <= tolerance`.
    pub tolerance: Option<f64>,
    /// Precompute the full `A^T A` table for the naive core's Gram-column
    /// gathers (the v0 core always precomputes it).
    pub precompute_gram: bool,
    pub factor_strategy: FactorStrategy,
    /// Normalize dictionary columns up front and rescale coefficients back;
    /// when disabled, columns must already be unit-norm.
    pub normalize: bool,
}

impl SolverOptions {
    pub fn new(sparsity: usize) -> Self {
        Self {
            sparsity,
            tolerance: None,
            precompute_gram: false,
            factor_strategy: FactorStrategy::Refactor,
            normalize: true,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = Some(tolerance);
        self
    }

    pub fn with_strategy(mut self, strategy: FactorStrategy) -> Self {
        self.factor_strategy = strategy;
        self
    }

    pub fn with_precompute_gram(mut self, on: bool) -> Self {
        self.precompute_gram = on;
        self
    }

    pub fn with_normalize(mut self, on: bool) -> Self {
        self.normalize = on;
        self
    }

    /// Validates against the measurement length `m`.
    pub fn validate(&self, m: usize) -> Result<()> {
        if self.sparsity == 0 {
            return Err(OmpError::InvalidOptions("sparsity must be at least 1".into()));
        }
        if self.sparsity > m {
            return Err(OmpError::InvalidOptions(format!(
                "sparsity {} exceeds measurement length {m}",
                self.sparsity
            )));
        }
        if let Some(eps) = self.tolerance {
            if eps.is_nan() || eps < 0.0 {
                return Err(OmpError::InvalidOptions(format!(
                    "tolerance must be non-negative, got {eps}"
                )));
            }
        }
        Ok(())
    }
}

/// `B` measurement vectors of length `M` in contiguous rows, with an
/// optional per-element stopping tolerance overriding the global one.
#[derive(Debug, Clone)]
pub struct MeasurementBatch {
    m: usize,
    data: Vec<f64>,
    tolerances: Vec<Option<f64>>,
}

impl MeasurementBatch {
    pub fn from_flat(batch: usize, m: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != batch * m {
            return Err(OmpError::ShapeMismatch {
                context: "MeasurementBatch data",
                expected: batch * m,
                got: data.len(),
            });
        }
        if m == 0 || batch == 0 {
            return Err(OmpError::InvalidInput("measurement batch must be non-empty".into()));
        }
        Ok(Self { m, data, tolerances: vec![None; batch] })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.first().map(Vec::len).unwrap_or(0);
        let mut data = Vec::with_capacity(rows.len() * m);
        for row in rows {
            if row.len() != m {
                return Err(OmpError::ShapeMismatch {
                    context: "MeasurementBatch row",
                    expected: m,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_flat(rows.len(), m, data)
    }

    pub fn single(y: &[f64]) -> Result<Self> {
        Self::from_flat(1, y.len(), y.to_vec())
    }

    pub fn len(&self) -> usize {
        self.tolerances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn measurement_len(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn element(&self, b: usize) -> &[f64] {
        &self.data[b * self.m..(b + 1) * self.m]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Per-element tolerance override; `None` falls back to the global
    /// option.
    pub fn set_tolerance(&mut self, b: usize, tolerance: Option<f64>) {
        self.tolerances[b] = tolerance;
    }

    /// Effective stopping tolerance for element `b` under `opts`.
    pub fn effective_tolerance(&self, b: usize, opts: &SolverOptions) -> Option<f64> {
        self.tolerances[b].or(opts.tolerance)
    }
}
