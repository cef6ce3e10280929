//! Precomputed Gram table `A^T A`, shared read-only across a batch and
//! reusable across batches against the same dictionary.

use rayon::prelude::*;

use crate::dictionary::PreparedDictionary;
use crate::vecops::dot;

/// Dense symmetric `N x N` table of atom inner products, row-major. Row `n`
/// doubles as the Gram column for atom `n`.
#[derive(Debug, Clone)]
pub struct GramTable {
    n: usize,
    data: Vec<f64>,
}

impl GramTable {
    /// Computes `A^T A` from the prepared dictionary; each entry is one dot
    /// product of two contiguous atoms and only the upper triangle is
    /// computed before mirroring.
    pub fn compute(dict: &PreparedDictionary) -> Self {
        let n = dict.atom_count();
        let mut data = vec![0.0; n * n];
        data.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            let ai = dict.atom(i);
            for (j, slot) in row.iter_mut().enumerate().skip(i) {
                *slot = dot(ai, dict.atom(j));
            }
        });
        for i in 0..n {
            for j in 0..i {
                data[i * n + j] = data[j * n + i];
            }
        }
        Self { n, data }
    }

    pub fn atom_count(&self) -> usize {
        self.n
    }

    /// Gram column for atom `n` (equals row `n` by symmetry), contiguous.
    #[inline]
    pub fn column(&self, n: usize) -> &[f64] {
        &self.data[n * self.n..(n + 1) * self.n]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }
}
