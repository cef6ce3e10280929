//! Batched kernels: absolute argmax over rows and the flattened
//! matrix/batched-vector product.
//!
//! A batch of vector products `[A^T r^1, ..., A^T r^B]` is one matrix-matrix
//! product once the vectors sit in contiguous rows, so the whole correlation
//! step is a single kernel invocation instead of `B` separate matrix-vector
//! calls.

use rayon::prelude::*;

use crate::error::{OmpError, Result};
use crate::matrix::{DenseMatrix, Layout};
use crate::vecops::dot;

/// Per-row index of the absolutely largest value in a `B x N` row-major
/// buffer. One pass per row; no intermediate absolute-value buffer. Ties
/// break to the lowest index, and NaN is rejected as corrupted input.
pub fn batched_abs_argmax(values: &[f64], row_len: usize) -> Result<Vec<usize>> {
    if row_len == 0 {
        return Err(OmpError::InvalidInput("argmax rows must have at least one entry".into()));
    }
    if !values.len().is_multiple_of(row_len) {
        return Err(OmpError::ShapeMismatch {
            context: "batched_abs_argmax buffer",
            expected: values.len().next_multiple_of(row_len),
            got: values.len(),
        });
    }
    let mut out = Vec::with_capacity(values.len() / row_len);
    for (b, row) in values.chunks_exact(row_len).enumerate() {
        let mut best = 0usize;
        let mut best_abs = -1.0f64;
        for (i, &v) in row.iter().enumerate() {
            if v.is_nan() {
                return Err(OmpError::NanCorrelation { batch: b, index: i });
            }
            let a = v.abs();
            if a > best_abs {
                best_abs = a;
                best = i;
            }
        }
        out.push(best);
    }
    Ok(out)
}

/// `result[b] = mat_t . vectors[b]` for `B` vectors of length `m`, stored as
/// contiguous rows of `vectors`; the output is `B x n` row-major.
///
/// The batch is treated as one `B x m` matrix, so the whole call is a single
/// matrix-matrix product (the reshape is metadata only). `mat_t` is `n x m`.
pub fn flatten_batched_product(
    mat_t: &DenseMatrix,
    vectors: &[f64],
    batch: usize,
) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    flatten_batched_product_into(mat_t, vectors, batch, &mut out)?;
    Ok(out)
}

/// Buffer-reusing variant of [`flatten_batched_product`].
pub fn flatten_batched_product_into(
    mat_t: &DenseMatrix,
    vectors: &[f64],
    batch: usize,
    out: &mut Vec<f64>,
) -> Result<()> {
    let n = mat_t.rows();
    let m = mat_t.cols();
    if vectors.len() != batch * m {
        return Err(OmpError::ShapeMismatch {
            context: "flatten_batched_product vectors",
            expected: batch * m,
            got: vectors.len(),
        });
    }
    out.clear();
    out.resize(batch * n, 0.0);
    if batch == 0 {
        return Ok(());
    }
    // Rows of mat_t against rows of the batch: contiguous on both sides when
    // mat_t is row-contiguous (fast path), strided gather otherwise. Batch
    // rows are processed in tiles so each matrix row is loaded once per tile
    // instead of once per vector; the matrix streams through far fewer times
    // on large batches.
    let rowwise = matches!(mat_t.layout(), Layout::RowContiguous).then(|| mat_t.data());
    let tile = BATCH_TILE.min(batch);
    let body = |(out_tile, v_tile): (&mut [f64], &[f64])| {
        let rows = v_tile.len() / m;
        match rowwise {
            Some(flat) => {
                for (p, mat_row) in flat.chunks_exact(m).enumerate() {
                    for t in 0..rows {
                        out_tile[t * n + p] = dot(mat_row, &v_tile[t * m..(t + 1) * m]);
                    }
                }
            }
            None => {
                for t in 0..rows {
                    let v = &v_tile[t * m..(t + 1) * m];
                    for p in 0..n {
                        let mut s = 0.0;
                        for (q, &vq) in v.iter().enumerate() {
                            s += mat_t.get(p, q) * vq;
                        }
                        out_tile[t * n + p] = s;
                    }
                }
            }
        }
    };
    let pairs = out.chunks_mut(tile * n).zip(vectors.chunks(tile * m));
    if batch > tile {
        pairs.collect::<Vec<_>>().into_par_iter().for_each(body);
    } else {
        pairs.for_each(body);
    }
    Ok(())
}

/// Batch rows per tile of the flattened product; sized so a tile of vectors
/// stays cache-resident while the matrix streams through once per tile.
const BATCH_TILE: usize = 8;
