//! The "naive" batched OMP core: per iteration, pick the most correlated
//! atom, extend the per-element workspace incrementally, solve the normal
//! equations, and update the residual.
//!
//! Incremental state keeps the per-iteration cost at one batched correlation
//! product plus per-element work: the selected-column block, `A_k^T y`, and
//! the packed Gram all grow by appending, and the factorization is either
//! redone from the packed Gram (O(k^3)) or extended by one Cholesky column
//! (O(k^2)) depending on the configured strategy. Elements stop
//! independently; finished ones are compacted out of the batch so later
//! iterations touch only live data.

use rayon::prelude::*;

use crate::batch::{
    check_stop, compact_in_place, compact_rows, ActiveSet, RecoveryFlag, RecoveryResult,
    ResultSink, StopCheck,
};
use crate::batched::{batched_abs_argmax, flatten_batched_product_into};
use crate::cholesky::{cholesky_factor, triangular_solve, CholeskyState, SolveMode};
use crate::dictionary::PreparedDictionary;
use crate::error::{OmpError, Result};
use crate::gram::GramTable;
use crate::matrix::DenseMatrix;
use crate::options::{FactorStrategy, MeasurementBatch, SolverOptions};
use crate::packed::PackedUpperTriangular;
use crate::vecops::{dot, norm, residual_from_columns};

/// Relative residual level treated as numerically zero: iteration stops once
/// `||r|| <= IMPLICIT_STOP_REL * ||y||` even without an explicit tolerance,
/// so a numerically singular extension is never factorized.
pub const IMPLICIT_STOP_REL: f64 = 1e-13;

/// Per-element incremental state of the naive core.
#[derive(Debug, Clone)]
pub struct NaiveWorkspace {
    m: usize,
    /// Selected atoms as contiguous columns, grown by appending (`M x k`).
    selected_columns: Vec<f64>,
    /// `A_k^T y`, grown by one dot product per iteration.
    aty: Vec<f64>,
    /// Packed upper triangle of `A_k^T A_k`, grown by one column per
    /// iteration.
    gram: PackedUpperTriangular,
    /// Selection order.
    support: Vec<usize>,
    /// Coefficients from the most recent successful solve (length = solved
    /// order; kept as the best-so-far answer under degeneracy).
    coefficients: Vec<f64>,
    /// Cholesky factor of the Gram; rebuilt or extended per the strategy.
    factor: CholeskyState,
    residual_norm: f64,
}

impl NaiveWorkspace {
    pub fn new(m: usize, sparsity: usize) -> Self {
        Self {
            m,
            selected_columns: Vec::with_capacity(m * sparsity),
            aty: Vec::with_capacity(sparsity),
            gram: PackedUpperTriangular::with_capacity(sparsity),
            support: Vec::with_capacity(sparsity),
            coefficients: Vec::with_capacity(sparsity),
            factor: CholeskyState::with_capacity(sparsity),
            residual_norm: f64::INFINITY,
        }
    }

    pub fn iteration(&self) -> usize {
        self.support.len()
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn aty(&self) -> &[f64] {
        &self.aty
    }

    pub fn gram(&self) -> &PackedUpperTriangular {
        &self.gram
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn residual_norm(&self) -> f64 {
        self.residual_norm
    }

    /// Column `j` of the selected block `A_k`.
    pub fn selected_column(&self, j: usize) -> &[f64] {
        &self.selected_columns[j * self.m..(j + 1) * self.m]
    }
}

/// Index of the atom most correlated with the residual (unit-norm columns
/// assumed); the batched form of this is one flattened product plus one
/// batched argmax, which this wraps for a single element.
pub fn select_atom(dict: &PreparedDictionary, residual: &[f64]) -> Result<usize> {
    let mut correlations = Vec::new();
    flatten_batched_product_into(dict.transpose(), residual, 1, &mut correlations)?;
    Ok(batched_abs_argmax(&correlations, dict.atom_count())?[0])
}

/// Appends atom `n_star` to the workspace: the column itself, its dot
/// product with `y`, and the new packed Gram column (gathered from the
/// precomputed table when available, else one `A_{k-1}^T a` product).
pub fn extend_workspace(
    ws: &mut NaiveWorkspace,
    dict: &PreparedDictionary,
    y: &[f64],
    n_star: usize,
    gram_table: Option<&GramTable>,
) -> Result<()> {
    if ws.support.contains(&n_star) {
        return Err(OmpError::DuplicateAtom { atom: n_star });
    }
    let atom = dict.atom(n_star);
    let k = ws.support.len();
    let mut gram_column = Vec::with_capacity(k + 1);
    match gram_table {
        Some(table) => {
            let row = table.column(n_star);
            gram_column.extend(ws.support.iter().map(|&prev| row[prev]));
            gram_column.push(row[n_star]);
        }
        None => {
            for j in 0..k {
                gram_column.push(dot(ws.selected_column(j), atom));
            }
            gram_column.push(dot(atom, atom));
        }
    }
    ws.gram.push_column(&gram_column)?;
    ws.aty.push(dot(atom, y));
    ws.selected_columns.extend_from_slice(atom);
    ws.support.push(n_star);
    Ok(())
}

/// Solves the normal equations for the current support and stores the
/// coefficients in the workspace. `Refactor` factorizes the packed Gram from
/// scratch; `Update` extends the kept factor by the newest Gram column.
pub fn solve_coefficients(ws: &mut NaiveWorkspace, strategy: FactorStrategy) -> Result<&[f64]> {
    let k = ws.gram.order();
    match strategy {
        FactorStrategy::Refactor => {
            ws.factor = cholesky_factor(&ws.gram)?;
        }
        FactorStrategy::Update => {
            if ws.factor.order() + 1 == k {
                let column = ws.gram.column(k - 1);
                ws.factor.append_in_place(&column[..k - 1], column[k - 1])?;
            } else if ws.factor.order() != k {
                return Err(OmpError::InvalidInput(format!(
                    "factor order {} cannot extend Gram order {k}",
                    ws.factor.order()
                )));
            }
        }
    }
    ws.coefficients = triangular_solve(&ws.factor, &ws.aty, SolveMode::Both)?;
    Ok(&ws.coefficients)
}

/// `y - A_k x` into `out`; `x` defaults to the workspace coefficients.
pub fn update_residual(ws: &NaiveWorkspace, y: &[f64], x: &[f64], out: &mut Vec<f64>) {
    residual_from_columns(y, &ws.selected_columns[..x.len() * ws.m], x, out)
}

fn scatter_result(
    ws: &NaiveWorkspace,
    dict: &PreparedDictionary,
    flag: RecoveryFlag,
) -> RecoveryResult {
    let solved = ws.coefficients.len();
    let mut coefficients = vec![0.0; dict.atom_count()];
    for (i, &atom) in ws.support[..solved].iter().enumerate() {
        coefficients[atom] = dict.record().rescale(atom, ws.coefficients[i]);
    }
    RecoveryResult {
        coefficients,
        support: ws.support[..solved].to_vec(),
        residual_norm: ws.residual_norm,
        iterations: solved,
        flag,
    }
}

enum Step {
    Running,
    Done(RecoveryFlag),
}

#[allow(clippy::too_many_arguments)]
fn naive_step(
    ws: &mut NaiveWorkspace,
    residual: &mut [f64],
    dict: &PreparedDictionary,
    gram_table: Option<&GramTable>,
    y: &[f64],
    y_norm: f64,
    n_star: usize,
    tolerance: Option<f64>,
    opts: &SolverOptions,
) -> Result<Step> {
    if ws.support.contains(&n_star) {
        // Numerical exhaustion: the residual no longer prefers a new atom.
        return Ok(Step::Done(RecoveryFlag::Degenerate));
    }
    extend_workspace(ws, dict, y, n_star, gram_table)?;
    match solve_coefficients(ws, opts.factor_strategy) {
        Ok(_) => {}
        Err(OmpError::RankDeficient { .. }) => {
            return Ok(Step::Done(RecoveryFlag::Degenerate));
        }
        Err(e) => return Err(e),
    }
    residual.copy_from_slice(y);
    for (j, &xj) in ws.coefficients.iter().enumerate() {
        crate::vecops::axpy(-xj, &ws.selected_columns[j * ws.m..(j + 1) * ws.m], residual);
    }
    ws.residual_norm = norm(residual);
    let k = ws.support.len();
    Ok(match check_stop(ws.residual_norm, k, tolerance, opts.sparsity) {
        StopCheck::StopTol => Step::Done(RecoveryFlag::TolReached),
        StopCheck::StopSparsity => Step::Done(RecoveryFlag::Completed),
        StopCheck::Continue => {
            if ws.residual_norm <= IMPLICIT_STOP_REL * y_norm {
                Step::Done(RecoveryFlag::TolReached)
            } else {
                Step::Running
            }
        }
    })
}

/// Runs the naive core over a batch. Elements iterate independently over the
/// shared read-only dictionary (and optional Gram table); finished elements
/// are compacted out so the batched correlation step shrinks with the active
/// set. Per-element degeneracy is reported in the result flag, never as a
/// batch failure.
pub fn run_naive(
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
    let gram_table = opts.precompute_gram.then(|| GramTable::compute(&prepared));
    run_naive_prepared(&prepared, gram_table.as_ref(), batch, opts)
}

pub(crate) fn run_naive_prepared(
    prepared: &PreparedDictionary,
    gram_table: Option<&GramTable>,
    batch: &MeasurementBatch,
    opts: &SolverOptions,
) -> Result<Vec<RecoveryResult>> {
    let m = prepared.measurement_len();
    let n = prepared.atom_count();
    let b = batch.len();
    let mut sink = ResultSink::new(b);
    let mut active = ActiveSet::new(b);
    let mut workspaces: Vec<NaiveWorkspace> =
        (0..b).map(|_| NaiveWorkspace::new(m, opts.sparsity)).collect();
    let mut residuals = batch.data().to_vec();
    let y_norms: Vec<f64> = (0..b).map(|i| norm(batch.element(i))).collect();

    // Initialization: r_0 = y; the stop checks already apply at k = 0.
    let mut keep = vec![true; b];
    for slot in 0..b {
        let orig = active.original_index(slot);
        workspaces[slot].residual_norm = y_norms[orig];
        let tol = batch.effective_tolerance(orig, opts);
        let stopped = match check_stop(y_norms[orig], 0, tol, opts.sparsity) {
            StopCheck::StopTol => Some(RecoveryFlag::TolReached),
            StopCheck::StopSparsity => Some(RecoveryFlag::Completed),
            // ||r_0|| = ||y||, so the implicit stop at k = 0 means y = 0.
            StopCheck::Continue => (y_norms[orig] == 0.0).then_some(RecoveryFlag::TolReached),
        };
        if let Some(flag) = stopped {
            sink.capture(orig, scatter_result(&workspaces[slot], prepared, flag))?;
            keep[slot] = false;
        }
    }
    compact_batch(&mut active, &mut workspaces, &mut residuals, m, &keep);

    let mut correlations = Vec::new();
    while active.live_count() > 0 {
        let live = active.live_count();
        flatten_batched_product_into(prepared.transpose(), &residuals, live, &mut correlations)?;
        let picks = batched_abs_argmax(&correlations, n)?;

        let outcomes: Vec<Result<Step>> = workspaces
            .par_iter_mut()
            .zip(residuals.par_chunks_mut(m))
            .enumerate()
            .map(|(slot, (ws, residual))| {
                let orig = active.original_index(slot);
                naive_step(
                    ws,
                    residual,
                    prepared,
                    gram_table,
                    batch.element(orig),
                    y_norms[orig],
                    picks[slot],
                    batch.effective_tolerance(orig, opts),
                    opts,
                )
            })
            .collect();

        let mut keep = vec![true; live];
        for (slot, outcome) in outcomes.into_iter().enumerate() {
            if let Step::Done(flag) = outcome? {
                let orig = active.original_index(slot);
                sink.capture(orig, scatter_result(&workspaces[slot], prepared, flag))?;
                keep[slot] = false;
            }
        }
        compact_batch(&mut active, &mut workspaces, &mut residuals, m, &keep);
    }
    sink.finish()
}

fn compact_batch(
    active: &mut ActiveSet,
    workspaces: &mut Vec<NaiveWorkspace>,
    residuals: &mut Vec<f64>,
    m: usize,
    keep: &[bool],
) {
    if keep.iter().all(|&k| k) {
        return;
    }
    active.compact(keep);
    compact_in_place(workspaces, keep);
    compact_rows(residuals, m, keep);
}
