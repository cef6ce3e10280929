//! Property tests for the kernel invariants.

use proptest::prelude::*;

use omp_core::batched::{batched_abs_argmax, flatten_batched_product};
use omp_core::cholesky::{cholesky_append, cholesky_factor, CholeskyState};
use omp_core::matrix::DenseMatrix;
use omp_core::packed::{pack_index, packed_len, PackedUpperTriangular};

/// Strategy for a symmetric positive definite matrix of the given order,
/// built as `B B^T + order * I` from a random square `B`.
fn spd_dense(order: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, order * order).prop_map(move |b| {
        let mut dense = vec![0.0; order * order];
        for i in 0..order {
            for j in 0..order {
                let mut s = if i == j { order as f64 } else { 0.0 };
                for t in 0..order {
                    s += b[i * order + t] * b[j * order + t];
                }
                dense[i * order + j] = s;
            }
        }
        dense
    })
}

proptest! {
    #[test]
    fn pack_unpack_round_trip(order in 1usize..8, seed in prop::collection::vec(-10.0f64..10.0, 64)) {
        // Symmetrize an arbitrary square block, pack it, and read it back.
        let mut dense = vec![0.0; order * order];
        for i in 0..order {
            for j in 0..order {
                let v = seed[(i * order + j) % seed.len()];
                dense[i * order + j] = v;
                dense[j * order + i] = v;
            }
        }
        let packed = PackedUpperTriangular::from_dense_upper(order, &dense).unwrap();
        prop_assert_eq!(packed.data().len(), packed_len(order));
        for j in 0..order {
            for i in 0..=j {
                prop_assert_eq!(packed.get(i, j), dense[i * order + j]);
                prop_assert_eq!(packed.data()[pack_index(i, j)], dense[i * order + j]);
            }
        }
    }

    #[test]
    fn incremental_append_matches_full_factorization(dense in (2usize..11).prop_flat_map(spd_dense)) {
        let order = (dense.len() as f64).sqrt() as usize;
        let gram = PackedUpperTriangular::from_dense_upper(order, &dense).unwrap();
        let full = cholesky_factor(&gram).unwrap();

        // Rebuild the same factor by appending one column at a time.
        let mut incremental = CholeskyState::with_capacity(order);
        for k in 0..order {
            let column = gram.column(k);
            incremental = cholesky_append(&incremental, &column[..k], column[k]).unwrap();
        }
        for r in 0..order {
            for c in 0..=r {
                let diff = (incremental.factor_entry(r, c) - full.factor_entry(r, c)).abs();
                prop_assert!(diff <= 1e-10, "entry ({r},{c}) differs by {diff}");
            }
        }
    }

    #[test]
    fn argmax_invariant_under_positive_row_scaling(
        row in prop::collection::vec(-100.0f64..100.0, 1..40),
        factor in 1e-3f64..1e3,
    ) {
        let base = batched_abs_argmax(&row, row.len()).unwrap();
        let scaled: Vec<f64> = row.iter().map(|v| v * factor).collect();
        let after = batched_abs_argmax(&scaled, scaled.len()).unwrap();
        prop_assert_eq!(base, after);
    }

    #[test]
    fn flattened_product_matches_per_vector_loop(
        m in 1usize..24,
        n in 1usize..12,
        b in 1usize..6,
        raw in prop::collection::vec(-2.0f64..2.0, 24 * 12 + 24 * 6),
    ) {
        let mat_data: Vec<f64> = (0..n * m).map(|i| raw[i]).collect();
        let vec_data: Vec<f64> = (0..b * m).map(|i| raw[raw.len() - 1 - i]).collect();
        let mat = DenseMatrix::from_row_major(n, m, mat_data).unwrap();
        let out = flatten_batched_product(&mat, &vec_data, b).unwrap();
        for bi in 0..b {
            let v = &vec_data[bi * m..(bi + 1) * m];
            for p in 0..n {
                let mut s = 0.0;
                for q in 0..m {
                    s += mat.get(p, q) * v[q];
                }
                let rel = (out[bi * n + p] - s).abs() / s.abs().max(1.0);
                prop_assert!(rel <= 1e-12, "relative error {rel} at ({bi},{p})");
            }
        }
    }
}
