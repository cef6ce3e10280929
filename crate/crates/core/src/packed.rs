//! Packed storage for symmetric/triangular matrices.
//!
//! Only the `k(k+1)/2` upper triangle is stored, grouped by column, so the
//! leading `j x j` sub-triangle of any order `j <= k` is a contiguous prefix
//! of the buffer. That makes both growing the matrix by one column and
//! handing a sub-problem to a solver pure slice operations.

use crate::error::{OmpError, Result};

/// Offset of upper-triangle element `(i, j)` (zero-based, `i <= j`) in the
/// column-grouped packed layout: `j(j+1)/2 + i`.
#[inline]
pub fn pack_index(i: usize, j: usize) -> usize {
    debug_assert!(i <= j);
    j * (j + 1) / 2 + i
}

/// Checked variant of [`pack_index`] against a capacity bound.
pub fn checked_pack_index(i: usize, j: usize, capacity: usize) -> Result<usize> {
    if i > j || j >= capacity {
        return Err(OmpError::PackedIndex { row: i, col: j, capacity });
    }
    Ok(pack_index(i, j))
}

/// Number of packed scalars for a matrix of the given order.
#[inline]
pub fn packed_len(order: usize) -> usize {
    order * (order + 1) / 2
}

/// Upper triangle of a symmetric matrix (or a triangular factor) in packed
/// column-grouped storage, growable up to a fixed capacity.
#[derive(Debug, Clone, PartialEq)]
pub struct PackedUpperTriangular {
    capacity: usize,
    order: usize,
    data: Vec<f64>,
}

impl PackedUpperTriangular {
    /// Empty triangle of order zero; storage for the full capacity is
    /// reserved up front so growth never reallocates.
    pub fn with_capacity(capacity: usize) -> Self {
        Self { capacity, order: 0, data: Vec::with_capacity(packed_len(capacity)) }
    }

    /// Builds an order-`n` triangle from the upper part of a dense symmetric
    /// matrix given in row-major order.
    pub fn from_dense_upper(n: usize, dense: &[f64]) -> Result<Self> {
        if dense.len() != n * n {
            return Err(OmpError::ShapeMismatch {
                context: "packed from_dense_upper",
                expected: n * n,
                got: dense.len(),
            });
        }
        let mut t = Self::with_capacity(n);
        for j in 0..n {
            for i in 0..=j {
                t.data.push(dense[i * n + j]);
            }
        }
        t.order = n;
        Ok(t)
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Packed scalars of the active `order(order+1)/2` prefix.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[pack_index(i, j)]
    }

    pub fn checked_get(&self, i: usize, j: usize) -> Result<f64> {
        checked_pack_index(i, j, self.order).map(|at| self.data[at])
    }

    /// Column `j` of the upper triangle (`j+1` scalars); contiguous by layout.
    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[packed_len(j)..packed_len(j + 1)]
    }

    /// Raises the capacity bound (never shrinks); existing data is untouched.
    pub fn reserve_order(&mut self, capacity: usize) {
        if capacity > self.capacity {
            self.capacity = capacity;
            self.data.reserve(packed_len(capacity) - self.data.len());
        }
    }

    /// Appends one column of the upper triangle, raising the order by one.
    /// `column` holds rows `0..=order` of the new column.
    pub fn push_column(&mut self, column: &[f64]) -> Result<()> {
        if self.order == self.capacity {
            return Err(OmpError::PackedIndex {
                row: 0,
                col: self.order,
                capacity: self.capacity,
            });
        }
        if column.len() != self.order + 1 {
            return Err(OmpError::ShapeMismatch {
                context: "packed push_column",
                expected: self.order + 1,
                got: column.len(),
            });
        }
        self.data.extend_from_slice(column);
        self.order += 1;
        Ok(())
    }

    /// Symmetric element access (reads the mirrored entry below the diagonal).
    #[inline]
    pub fn get_symmetric(&self, i: usize, j: usize) -> f64 {
        if i <= j {
            self.get(i, j)
        } else {
            self.get(j, i)
        }
    }
}
