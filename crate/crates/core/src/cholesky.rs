//! Cholesky factorization over packed storage, with O(k^2) rank extension.
//!
//! The factor `V` is lower triangular with `V V^T` equal to the factored
//! Gram matrix. It is stored transposed in the packed upper layout, which
//! puts each row of `V` in one contiguous run: row `r` of `V` occupies
//! packed column `r`. Extending the factorization by one column then appends
//! `k+1` scalars to the buffer, and both triangular sweeps walk contiguous
//! memory.

use crate::error::{OmpError, Result};
use crate::packed::PackedUpperTriangular;
use crate::vecops::{dot, norm_sq};

/// Relative tolerance below which a new pivot is treated as rank-deficient:
/// the extension is rejected when `self_sq - ||z||^2 <= TOL * self_sq`.
pub const DEGENERACY_REL_TOL: f64 = 1e-12;

/// Triangle(s) to solve against in [`triangular_solve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    /// `V w = rhs`
    Forward,
    /// `V^T x = rhs`
    Backward,
    /// `V V^T x = rhs` (normal-equation solve)
    Both,
}

/// Lower-triangular Cholesky factor `V` of a symmetric positive definite
/// matrix, held in packed storage with strictly positive diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyState {
    factor: PackedUpperTriangular,
}

impl CholeskyState {
    /// Order-zero factor able to grow up to `capacity`.
    pub fn with_capacity(capacity: usize) -> Self {
        Self { factor: PackedUpperTriangular::with_capacity(capacity) }
    }

    pub fn order(&self) -> usize {
        self.factor.order()
    }

    /// Element `V[row][col]` of the lower-triangular factor (`col <= row`).
    #[inline]
    pub fn factor_entry(&self, row: usize, col: usize) -> f64 {
        debug_assert!(col <= row);
        // V stored transposed: packed (col, row) of the upper layout.
        self.factor.get(col, row)
    }

    /// Row `r` of `V` (`r+1` scalars), contiguous by construction.
    #[inline]
    pub fn factor_row(&self, r: usize) -> &[f64] {
        self.factor.column(r)
    }

    pub fn packed(&self) -> &PackedUpperTriangular {
        &self.factor
    }

    /// Multiplies `V V^T` back into a packed Gram matrix; used by tests and
    /// consistency checks.
    pub fn reconstruct_gram(&self) -> PackedUpperTriangular {
        let k = self.order();
        let mut gram = PackedUpperTriangular::with_capacity(k);
        let mut col = Vec::with_capacity(k);
        for j in 0..k {
            col.clear();
            let row_j = self.factor_row(j);
            for i in 0..=j {
                let row_i = self.factor_row(i);
                // (V V^T)[i][j] = sum_t V[i][t] V[j][t], t <= min(i, j) = i.
                col.push(dot(row_i, &row_j[..=i]));
            }
            gram.push_column(&col).expect("capacity fixed to order");
        }
        gram
    }
}

/// Factorizes a packed symmetric positive definite matrix from scratch in
/// O(k^3): returns `V` with `V V^T = gram`.
///
/// A pivot that is not positive (relative to its diagonal entry, see
/// [`DEGENERACY_REL_TOL`]) yields `RankDeficient` carrying the zero-based
/// order at which factorization failed.
pub fn cholesky_factor(gram: &PackedUpperTriangular) -> Result<CholeskyState> {
    let k = gram.order();
    let mut state = CholeskyState::with_capacity(k);
    let mut row = Vec::with_capacity(k);
    for j in 0..k {
        // Row j of V: off-diagonal entries then the pivot.
        row.clear();
        for c in 0..j {
            let num = gram.get(c, j) - dot(&row[..c], &state.factor_row(c)[..c]);
            row.push(num / state.factor_entry(c, c));
        }
        let diag_sq = gram.get(j, j) - norm_sq(&row);
        if diag_sq <= DEGENERACY_REL_TOL * gram.get(j, j) {
            return Err(OmpError::RankDeficient { order: j });
        }
        row.push(diag_sq.sqrt());
        state.factor.push_column(&row)?;
    }
    Ok(state)
}

impl CholeskyState {
    /// In-place variant of [`cholesky_append`]; the state is unchanged when
    /// an error is returned.
    pub fn append_in_place(&mut self, cross: &[f64], self_sq: f64) -> Result<()> {
        let k = self.order();
        if cross.len() != k {
            return Err(OmpError::ShapeMismatch {
                context: "cholesky_append cross vector",
                expected: k,
                got: cross.len(),
            });
        }
        if self_sq <= 0.0 {
            return Err(OmpError::RankDeficient { order: k });
        }
        let z = forward_substitute(self, cross)?;
        let diag_sq = self_sq - norm_sq(&z);
        if diag_sq <= DEGENERACY_REL_TOL * self_sq {
            return Err(OmpError::RankDeficient { order: k });
        }
        self.factor.reserve_order(k + 1);
        let mut row = z;
        row.push(diag_sq.sqrt());
        self.factor.push_column(&row)
    }
}

/// Extends a factorization by one column in O(k^2): solves `V z = cross`,
/// appends row `[z^T, sqrt(self_sq - ||z||^2)]`.
///
/// `cross` is the cross-Gram of the new column against the already-selected
/// ones and `self_sq` its squared norm. If the remainder under the square
/// root is non-positive relative to `self_sq`, the new column is numerically
/// dependent on the selected set and `RankDeficient` is returned.
pub fn cholesky_append(state: &CholeskyState, cross: &[f64], self_sq: f64) -> Result<CholeskyState> {
    let mut extended = state.clone();
    extended.append_in_place(cross, self_sq)?;
    Ok(extended)
}

/// Solves against the factor per [`SolveMode`].
pub fn triangular_solve(state: &CholeskyState, rhs: &[f64], mode: SolveMode) -> Result<Vec<f64>> {
    let k = state.order();
    if rhs.len() != k {
        return Err(OmpError::ShapeMismatch {
            context: "triangular_solve rhs",
            expected: k,
            got: rhs.len(),
        });
    }
    match mode {
        SolveMode::Forward => forward_substitute(state, rhs),
        SolveMode::Backward => {
            let mut x = rhs.to_vec();
            backward_substitute_in_place(state, &mut x)?;
            Ok(x)
        }
        SolveMode::Both => {
            let mut x = forward_substitute(state, rhs)?;
            backward_substitute_in_place(state, &mut x)?;
            Ok(x)
        }
    }
}

/// `V w = rhs` by rows; each row of `V` is contiguous.
fn forward_substitute(state: &CholeskyState, rhs: &[f64]) -> Result<Vec<f64>> {
    let k = state.order();
    let mut w = Vec::with_capacity(k);
    for i in 0..k {
        let row = state.factor_row(i);
        let diag = row[i];
        if diag == 0.0 {
            return Err(OmpError::ZeroDiagonal { index: i });
        }
        let s = rhs[i] - dot(&row[..i], &w);
        w.push(s / diag);
    }
    Ok(w)
}

/// `V^T x = w` in place, swept column-wise so only contiguous rows of `V`
/// are read.
fn backward_substitute_in_place(state: &CholeskyState, w: &mut [f64]) -> Result<()> {
    let k = state.order();
    for i in (0..k).rev() {
        let row = state.factor_row(i);
        let diag = row[i];
        if diag == 0.0 {
            return Err(OmpError::ZeroDiagonal { index: i });
        }
        let xi = w[i] / diag;
        w[i] = xi;
        // Eliminate x_i from the remaining equations c < i.
        for c in 0..i {
            w[c] -= row[c] * xi;
        }
    }
    Ok(())
}
