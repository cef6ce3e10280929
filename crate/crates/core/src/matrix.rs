//! Dense matrix storage with an explicit memory-layout tag.
//!
//! Layout is kept separate from use: transposition swaps the dimension
//! metadata and flips the layout tag without touching the data buffer, so a
//! column-contiguous `M x N` matrix and its row-contiguous `N x M` transpose
//! share the exact same element ordering.

use crate::error::{OmpError, Result};

/// Element addressing of the backing buffer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// `data[i * cols + j]` holds element `(i, j)`; rows are contiguous.
    RowContiguous,
    /// `data[j * rows + i]` holds element `(i, j)`; columns are contiguous.
    ColContiguous,
}

/// Dense matrix of f64 scalars.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    layout: Layout,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, layout: Layout, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(OmpError::ShapeMismatch {
                context: "DenseMatrix data buffer",
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, layout, data })
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        Self::new(rows, cols, Layout::RowContiguous, data)
    }

    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        Self::new(rows, cols, Layout::ColContiguous, data)
    }

    /// Widening constructor for single-precision input; all internal
    /// arithmetic runs in double precision.
    pub fn from_row_major_f32(rows: usize, cols: usize, data: &[f32]) -> Result<Self> {
        Self::from_row_major(rows, cols, data.iter().map(|&v| f64::from(v)).collect())
    }

    pub fn zeros(rows: usize, cols: usize, layout: Layout) -> Self {
        Self { rows, cols, layout, data: vec![0.0; rows * cols] }
    }

    /// Identity matrix (row-contiguous).
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n, Layout::RowContiguous);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    fn offset(&self, row: usize, col: usize) -> usize {
        debug_assert!(row < self.rows && col < self.cols);
        match self.layout {
            Layout::RowContiguous => row * self.cols + col,
            Layout::ColContiguous => col * self.rows + row,
        }
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[self.offset(row, col)]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        let at = self.offset(row, col);
        self.data[at] = value;
    }

    /// Contiguous row slice; available only in row-contiguous layout.
    pub fn row(&self, row: usize) -> Option<&[f64]> {
        match self.layout {
            Layout::RowContiguous => Some(&self.data[row * self.cols..(row + 1) * self.cols]),
            Layout::ColContiguous => None,
        }
    }

    /// Contiguous column slice; available only in column-contiguous layout.
    pub fn column(&self, col: usize) -> Option<&[f64]> {
        match self.layout {
            Layout::ColContiguous => Some(&self.data[col * self.rows..(col + 1) * self.rows]),
            Layout::RowContiguous => None,
        }
    }

    pub fn copy_column_into(&self, col: usize, out: &mut Vec<f64>) {
        out.clear();
        match self.column(col) {
            Some(slice) => out.extend_from_slice(slice),
            None => out.extend((0..self.rows).map(|i| self.get(i, col))),
        }
    }

    /// Metadata-only transpose: dimensions swap, the layout tag flips, and the
    /// backing buffer keeps its exact element ordering.
    pub fn into_transposed(mut self) -> Self {
        std::mem::swap(&mut self.rows, &mut self.cols);
        self.layout = match self.layout {
            Layout::RowContiguous => Layout::ColContiguous,
            Layout::ColContiguous => Layout::RowContiguous,
        };
        self
    }

    pub fn transposed(&self) -> Self {
        self.clone().into_transposed()
    }

    /// Reorders storage so rows are contiguous (no-op if already so).
    pub fn to_row_contiguous(&self) -> Self {
        match self.layout {
            Layout::RowContiguous => self.clone(),
            Layout::ColContiguous => {
                let mut data = Vec::with_capacity(self.rows * self.cols);
                for i in 0..self.rows {
                    for j in 0..self.cols {
                        data.push(self.get(i, j));
                    }
                }
                Self { rows: self.rows, cols: self.cols, layout: Layout::RowContiguous, data }
            }
        }
    }
}
