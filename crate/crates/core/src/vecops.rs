//! Small contiguous-slice primitives shared by the optimized cores.
//!
//! The dot product keeps eight independent accumulators so the compiler can
//! vectorize it and hide the add latency; for slices shorter than eight
//! lanes it degenerates to the plain sequential sum.

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 8];
    let chunks_a = a.chunks_exact(8);
    let chunks_b = b.chunks_exact(8);
    let tail_a = chunks_a.remainder();
    let tail_b = chunks_b.remainder();
    for (x, y) in chunks_a.zip(chunks_b) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
        acc[4] += x[4] * y[4];
        acc[5] += x[5] * y[5];
        acc[6] += x[6] * y[6];
        acc[7] += x[7] * y[7];
    }
    let mut tail = 0.0;
    for (x, y) in tail_a.iter().zip(tail_b) {
        tail += x * y;
    }
    ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail
}

/// `y += alpha * x`
#[inline]
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
pub(crate) fn scale(alpha: f64, x: &mut [f64]) {
    for xi in x {
        *xi *= alpha;
    }
}

#[inline]
pub(crate) fn norm_sq(x: &[f64]) -> f64 {
    dot(x, x)
}

#[inline]
pub(crate) fn norm(x: &[f64]) -> f64 {
    norm_sq(x).sqrt()
}

/// `y - A x` for a column-contiguous `m x k` matrix given as `k` stacked
/// columns of length `m`.
pub(crate) fn residual_from_columns(y: &[f64], cols: &[f64], x: &[f64], out: &mut Vec<f64>) {
    let m = y.len();
    debug_assert_eq!(cols.len(), m * x.len());
    out.clear();
    out.extend_from_slice(y);
    for (j, &xj) in x.iter().enumerate() {
        axpy(-xj, &cols[j * m..(j + 1) * m], out);
    }
}
