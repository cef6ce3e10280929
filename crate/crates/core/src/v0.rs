//! The v0 core: inverse-Cholesky OMP that never forms the residual.
//!
//! Instead of solving triangular systems each iteration, this core maintains
//! the inverse Cholesky factor `F_k = V_k^{-T}` of the selected Gram and a
//! projection table `D_k = A^T A_k F_k`, one row per iteration. All `N`
//! projections `A^T r_k` are then updated in place with a single
//! matrix-vector product per iteration, in O(Nk) time:
//!
//! * the cross-solve vector `z` is read straight out of column `n*` of `D`,
//! * `gamma = 1 / sqrt(||a||^2 - ||z||^2)` scales the new row
//!   `d_k = gamma (g_{n*} - D^T z)` built from the precomputed Gram column,
//! * the projections drop by `alpha d_k` where `alpha = gamma * p[n*]`,
//! * `||r_k||^2 = ||r_{k-1}||^2 - alpha^2` tracks the residual norm for the
//!   stopping test without ever materializing the residual.
//!
//! Final coefficients come from `x = F F^T (A_k^T y)` using matrix-vector
//! products only.

use rayon::prelude::*;

use crate::batch::{check_stop, RecoveryFlag, RecoveryResult, ResultSink, StopCheck};
use crate::batched::{batched_abs_argmax, flatten_batched_product_into};
use crate::cholesky::DEGENERACY_REL_TOL;
use crate::dictionary::PreparedDictionary;
use crate::error::{OmpError, Result};
use crate::gram::GramTable;
use crate::matrix::DenseMatrix;
use crate::naive::IMPLICIT_STOP_REL;
use crate::options::{MeasurementBatch, SolverOptions};
use crate::vecops::{axpy, dot, norm, norm_sq, scale};

/// Inverse Cholesky factor `F_k = V_k^{-T}` in the leading `k x k` block of
/// a dense `S x S` buffer; upper triangular with positive diagonal.
#[derive(Debug, Clone)]
pub struct InverseCholState {
    capacity: usize,
    order: usize,
    f: Vec<f64>,
}

impl InverseCholState {
    pub fn new(capacity: usize) -> Self {
        Self { capacity, order: 0, f: vec![0.0; capacity * capacity] }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Entry `F[row][col]` of the leading block.
    #[inline]
    pub fn factor_entry(&self, row: usize, col: usize) -> f64 {
        debug_assert!(row < self.order && col < self.order);
        self.f[row * self.capacity + col]
    }

    /// `F_{k} v` over the leading block (length-`k` input and output).
    fn mul_leading(&self, v: &[f64]) -> Vec<f64> {
        let k = v.len();
        debug_assert!(k <= self.order);
        (0..k)
            .map(|i| dot(&self.f[i * self.capacity + i..i * self.capacity + k], &v[i..]))
            .collect()
    }

    /// `F_k^T v` over the leading block.
    fn mul_transpose_leading(&self, v: &[f64]) -> Vec<f64> {
        let k = v.len();
        debug_assert!(k <= self.order);
        (0..k)
            .map(|j| {
                let mut s = 0.0;
                for (i, &vi) in v.iter().enumerate().take(j + 1) {
                    s += self.f[i * self.capacity + j] * vi;
                }
                s
            })
            .collect()
    }

    /// Appends the extension column `[-gamma F_{k-1} z; gamma]`.
    fn append_column(&mut self, z: &[f64], gamma: f64) {
        let k = self.order;
        debug_assert_eq!(z.len(), k);
        debug_assert!(k < self.capacity);
        let fz = self.mul_leading(z);
        for (i, fz_i) in fz.into_iter().enumerate() {
            self.f[i * self.capacity + k] = -gamma * fz_i;
        }
        self.f[k * self.capacity + k] = gamma;
        self.order = k + 1;
    }
}

/// Per-element projection state: the in-place-updated projections
/// `A^T r_k`, the growing `D` table, and the `A_k^T y` entries gathered on
/// selection.
#[derive(Debug, Clone)]
pub struct ProjectionState {
    n: usize,
    sparsity: usize,
    /// `A^T r_k`, length `N`, updated in place each iteration.
    projections: Vec<f64>,
    /// Initial projections `A^T y`; the source for `aty` gathers.
    initial_projections: Vec<f64>,
    /// `D_k` rows, appended one per iteration into reserved (but never
    /// pre-filled) capacity `S x N`; row `j` is fully written at iteration
    /// `j` before any read.
    d: Vec<f64>,
    /// `A_k^T y` entries in selection order.
    aty: Vec<f64>,
    support: Vec<usize>,
    /// `||r_k||^2`, tracked incrementally.
    residual_sq: f64,
    y_norm: f64,
}

impl ProjectionState {
    pub fn projections(&self) -> &[f64] {
        &self.projections
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn aty(&self) -> &[f64] {
        &self.aty
    }

    /// Row `j` of `D_k` (length `N`).
    pub fn d_row(&self, j: usize) -> &[f64] {
        &self.d[j * self.n..(j + 1) * self.n]
    }

    pub fn iteration(&self) -> usize {
        self.support.len()
    }

    pub fn residual_norm(&self) -> f64 {
        self.residual_sq.max(0.0).sqrt()
    }

    pub fn y_norm(&self) -> f64 {
        self.y_norm
    }
}

/// Computes the shared Gram table and the per-element initial projection
/// states. `D` capacity is reserved without initialization cost; rows are
/// written exactly once before being read.
pub fn init_v0(
    dict: &PreparedDictionary,
    batch: &MeasurementBatch,
    opts: &SolverOptions,
) -> Result<(GramTable, Vec<ProjectionState>)> {
    let gram = GramTable::compute(dict);
    let states = init_v0_states(dict, batch, opts)?;
    Ok((gram, states))
}

fn init_v0_states(
    dict: &PreparedDictionary,
    batch: &MeasurementBatch,
    opts: &SolverOptions,
) -> Result<Vec<ProjectionState>> {
    let n = dict.atom_count();
    let m = dict.measurement_len();
    let b = batch.len();
    let s = opts.sparsity;
    // Asymptotic working set: inputs, Gramian, and the B projection tables.
    let estimate_scalars = n * m + n * n + b * n * s;
    let mut projections = Vec::new();
    flatten_batched_product_into(dict.transpose(), batch.data(), b, &mut projections)?;
    (0..b)
        .map(|i| {
            let p = projections[i * n..(i + 1) * n].to_vec();
            let mut d = Vec::new();
            d.try_reserve_exact(s * n).map_err(|_| OmpError::MemoryBudget {
                bytes: estimate_scalars * std::mem::size_of::<f64>(),
                detail: format!(
                    "O(NM + N^2 + BNS) scalars = {} + {} + {}",
                    n * m,
                    n * n,
                    b * n * s
                ),
            })?;
            Ok(ProjectionState {
                n,
                sparsity: s,
                initial_projections: p.clone(),
                projections: p,
                d,
                aty: Vec::with_capacity(s),
                support: Vec::with_capacity(s),
                residual_sq: norm_sq(batch.element(i)),
                y_norm: norm(batch.element(i)),
            })
        })
        .collect()
}

/// One v0 iteration: select on the maintained projections, extend `D` and
/// `F`, and update the projections in place. Returns the selected atom.
pub fn v0_iterate(
    state: &mut ProjectionState,
    inv: &mut InverseCholState,
    gram: &GramTable,
) -> Result<usize> {
    let n = state.n;
    let k = state.support.len();
    if k >= state.sparsity {
        return Err(OmpError::InvalidInput(format!(
            "v0 state already holds its sparsity target of {} atoms",
            state.sparsity
        )));
    }
    if inv.order() != k {
        return Err(OmpError::InvalidInput(format!(
            "inverse factor order {} out of step with {} selected atoms",
            inv.order(),
            k
        )));
    }
    let n_star = batched_abs_argmax(&state.projections, n)?[0];
    if state.support.contains(&n_star) {
        return Err(OmpError::RankDeficient { order: k });
    }
    let gram_column = gram.column(n_star);
    // z = F_{k-1}^T A_{k-1}^T a_{n*} is exactly column n* of the D rows.
    let z: Vec<f64> = (0..k).map(|j| state.d[j * n + n_star]).collect();
    let self_sq = gram_column[n_star];
    let gap = self_sq - norm_sq(&z);
    if gap <= DEGENERACY_REL_TOL * self_sq {
        return Err(OmpError::RankDeficient { order: k });
    }
    let gamma = gap.sqrt().recip();

    // New D row: gamma * (gram column - sum_j z_j d_j), swept row-wise.
    let row_start = k * n;
    state.d.extend_from_slice(gram_column);
    let (prev, new_row) = state.d.split_at_mut(row_start);
    for (j, &zj) in z.iter().enumerate() {
        axpy(-zj, &prev[j * n..(j + 1) * n], new_row);
    }
    scale(gamma, new_row);

    // Projection update: p -= alpha d_k with alpha = gamma * p[n*], the
    // F-weighted projection increment; the same alpha drops ||r||^2.
    let alpha = gamma * state.projections[n_star];
    axpy(-alpha, new_row, &mut state.projections);
    state.residual_sq -= alpha * alpha;

    inv.append_column(&z, gamma);
    state.aty.push(state.initial_projections[n_star]);
    state.support.push(n_star);
    Ok(n_star)
}

/// `x = F F^T (A_k^T y)` via two matrix-vector products, scattered to the
/// support positions and rescaled to the caller's column scaling.
pub fn reconstruct_coefficients(
    inv: &InverseCholState,
    aty: &[f64],
    support: &[usize],
    dict: &PreparedDictionary,
) -> Vec<f64> {
    let q = inv.mul_transpose_leading(aty);
    let x = inv.mul_leading(&q);
    let mut coefficients = vec![0.0; dict.atom_count()];
    for (i, &atom) in support.iter().enumerate() {
        coefficients[atom] = dict.record().rescale(atom, x[i]);
    }
    coefficients
}

/// Runs the v0 core over a batch. The Gram table is computed once and shared
/// read-only; per-element iteration is embarrassingly parallel. Elements
/// that stop early have their result captured at that iteration while state
/// stays in place (no compaction).
pub fn run_v0(
    dict: &DenseMatrix,
    batch: &MeasurementBatch,
    opts: &SolverOptions,
) -> Result<Vec<RecoveryResult>> {
    let m = dict.rows();
    if batch.measurement_len() != m {
        return Err(OmpError::ShapeMismatch {
            context: "measurement length vs dictionary rows",
            expected: m,
            got: batch.measurement_len(),
        });
    }
    opts.validate(m)?;
    let prepared = PreparedDictionary::new(dict, opts.normalize)?;
    let gram = GramTable::compute(&prepared);
    run_v0_prepared(&prepared, &gram, batch, opts)
}

/// Prepared dictionary plus its Gram table, reusable across batches: the
/// Gram precompute is the dominant fixed cost of this core and is shared by
/// every batch solved against the same dictionary.
#[derive(Debug, Clone)]
pub struct V0Session {
    prepared: PreparedDictionary,
    gram: GramTable,
}

impl V0Session {
    pub fn new(dict: &DenseMatrix, normalize: bool) -> Result<Self> {
        let prepared = PreparedDictionary::new(dict, normalize)?;
        let gram = GramTable::compute(&prepared);
        Ok(Self { prepared, gram })
    }

    pub fn prepared(&self) -> &PreparedDictionary {
        &self.prepared
    }

    pub fn gram(&self) -> &GramTable {
        &self.gram
    }

    /// Solves a batch against the cached dictionary and Gram table.
    pub fn run(&self, batch: &MeasurementBatch, opts: &SolverOptions) -> Result<Vec<RecoveryResult>> {
        if batch.measurement_len() != self.prepared.measurement_len() {
            return Err(OmpError::ShapeMismatch {
                context: "measurement length vs dictionary rows",
                expected: self.prepared.measurement_len(),
                got: batch.measurement_len(),
            });
        }
        run_v0_prepared(&self.prepared, &self.gram, batch, opts)
    }
}

/// Variant reusing an already-computed Gram table (it is cacheable across
/// batches against the same prepared dictionary).
pub(crate) fn run_v0_prepared(
    prepared: &PreparedDictionary,
    gram: &GramTable,
    batch: &MeasurementBatch,
    opts: &SolverOptions,
) -> Result<Vec<RecoveryResult>> {
    opts.validate(prepared.measurement_len())?;
    let b = batch.len();
    let mut states = init_v0_states(prepared, batch, opts)?;
    let results: Vec<Result<RecoveryResult>> = states
        .par_iter_mut()
        .enumerate()
        .map(|(i, state)| {
            let tol = batch.effective_tolerance(i, opts);
            run_v0_element(state, gram, prepared, tol, opts.sparsity)
        })
        .collect();
    let mut sink = ResultSink::new(b);
    for (i, result) in results.into_iter().enumerate() {
        sink.capture(i, result?)?;
    }
    sink.finish()
}

fn run_v0_element(
    state: &mut ProjectionState,
    gram: &GramTable,
    dict: &PreparedDictionary,
    tolerance: Option<f64>,
    sparsity: usize,
) -> Result<RecoveryResult> {
    let mut inv = InverseCholState::new(sparsity);
    let flag = loop {
        let k = state.support.len();
        match check_stop(state.residual_norm(), k, tolerance, sparsity) {
            StopCheck::StopTol => break RecoveryFlag::TolReached,
            StopCheck::StopSparsity => break RecoveryFlag::Completed,
            StopCheck::Continue => {
                if state.residual_norm() <= IMPLICIT_STOP_REL * state.y_norm {
                    break RecoveryFlag::TolReached;
                }
            }
        }
        match v0_iterate(state, &mut inv, gram) {
            Ok(_) => {}
            Err(OmpError::RankDeficient { .. }) => break RecoveryFlag::Degenerate,
            Err(e) => return Err(e),
        }
    };
    Ok(RecoveryResult {
        coefficients: reconstruct_coefficients(&inv, &state.aty, &state.support, dict),
        support: state.support.clone(),
        residual_norm: state.residual_norm(),
        iterations: state.support.len(),
        flag,
    })
}
