//! Batched iteration scaffolding: stop checks, active-set compaction for the
//! naive core, and capture-in-place bookkeeping for the v0 core.

use crate::error::{OmpError, Result};

/// Why an element stopped iterating.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecoveryFlag {
    /// Ran to the sparsity target `S`.
    Completed,
    /// Residual tolerance reached (explicit `tolerance`, or the residual
    /// became numerically zero).
    TolReached,
    /// Numerical degeneracy: the next extension was dependent on the
    /// selected set; the result holds the best coefficients so far.
    Degenerate,
}

/// Per-element recovery output.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult {
    /// Full-length sparse coefficient vector (zero off-support), in the
    /// caller's original column scaling.
    pub coefficients: Vec<f64>,
    /// Atom indices in selection order; `support.len() == iterations`.
    pub support: Vec<usize>,
    /// Final residual 2-norm.
    pub residual_norm: f64,
    /// Iterations used.
    pub iterations: usize,
    pub flag: RecoveryFlag,
}

/// Outcome of the stop check run after each completed iteration (and once
/// before the first).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopCheck {
    Continue,
    /// Residual norm at or below the tolerance; checked before sparsity.
    StopTol,
    /// Sparsity target reached.
    StopSparsity,
}

/// Evaluates the stopping criteria: the tolerance (when present) before the
/// sparsity target.
pub fn check_stop(residual_norm: f64, k: usize, tolerance: Option<f64>, sparsity: usize) -> StopCheck {
    if let Some(eps) = tolerance {
        if residual_norm <= eps {
            return StopCheck::StopTol;
        }
    }
    if k >= sparsity {
        return StopCheck::StopSparsity;
    }
    StopCheck::Continue
}

/// Maps live batch slots back to original input positions while finished
/// elements are compacted away.
#[derive(Debug, Clone)]
pub struct ActiveSet {
    original_index: Vec<usize>,
}

impl ActiveSet {
    pub fn new(batch: usize) -> Self {
        Self { original_index: (0..batch).collect() }
    }

    pub fn live_count(&self) -> usize {
        self.original_index.len()
    }

    #[inline]
    pub fn original_index(&self, slot: usize) -> usize {
        self.original_index[slot]
    }

    /// Drops finished slots, keeping the remaining ones packed in order.
    /// `keep` is indexed by slot; returns the original indices removed.
    pub fn compact(&mut self, keep: &[bool]) -> Vec<usize> {
        debug_assert_eq!(keep.len(), self.original_index.len());
        let mut removed = Vec::new();
        let mut slot = 0;
        self.original_index.retain(|&orig| {
            let keep_it = keep[slot];
            slot += 1;
            if !keep_it {
                removed.push(orig);
            }
            keep_it
        });
        removed
    }
}

/// Removes the items whose slot is marked finished, shifting the survivors
/// down so the live prefix stays one contiguous block.
pub fn compact_in_place<T>(items: &mut Vec<T>, keep: &[bool]) {
    debug_assert_eq!(items.len(), keep.len());
    let mut slot = 0;
    items.retain(|_| {
        let keep_it = keep[slot];
        slot += 1;
        keep_it
    });
}

/// Row-buffer variant of [`compact_in_place`] for a flat `slots x width`
/// buffer.
pub fn compact_rows(buffer: &mut Vec<f64>, width: usize, keep: &[bool]) {
    debug_assert_eq!(buffer.len(), keep.len() * width);
    let mut write = 0;
    for (slot, &k) in keep.iter().enumerate() {
        if k {
            let read = slot * width;
            if read != write {
                buffer.copy_within(read..read + width, write);
            }
            write += width;
        }
    }
    buffer.truncate(write);
}

/// Collects per-element results as their stop criteria fire; a captured
/// result is immutable and every element must be captured exactly once.
#[derive(Debug)]
pub struct ResultSink {
    results: Vec<Option<RecoveryResult>>,
}

impl ResultSink {
    pub fn new(batch: usize) -> Self {
        Self { results: (0..batch).map(|_| None).collect() }
    }

    /// Records the result for an input position. A second capture for the
    /// same position is a driver logic error.
    pub fn capture(&mut self, original_index: usize, result: RecoveryResult) -> Result<()> {
        let slot = &mut self.results[original_index];
        if slot.is_some() {
            return Err(OmpError::DoubleCapture { index: original_index });
        }
        *slot = Some(result);
        Ok(())
    }

    pub fn is_captured(&self, original_index: usize) -> bool {
        self.results[original_index].is_some()
    }

    pub fn get(&self, original_index: usize) -> Option<&RecoveryResult> {
        self.results[original_index].as_ref()
    }

    /// All `B` results in original input order; errors if any are missing.
    pub fn finish(self) -> Result<Vec<RecoveryResult>> {
        self.results
            .into_iter()
            .enumerate()
            .map(|(i, r)| r.ok_or(OmpError::MissingResult { index: i }))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stop_checks_follow_precedence() {
        assert_eq!(check_stop(1.0, 0, None, 3), StopCheck::Continue);
        assert_eq!(check_stop(0.0, 0, Some(0.0), 3), StopCheck::StopTol);
        assert_eq!(check_stop(1.0, 3, Some(0.5), 3), StopCheck::StopSparsity);
        // Tolerance wins over sparsity when both hold.
        assert_eq!(check_stop(0.1, 3, Some(0.5), 3), StopCheck::StopTol);
    }

    #[test]
    fn compaction_drops_finished_slots_in_order() {
        let mut set = ActiveSet::new(4);
        let mut payloads = vec!["a", "b", "c", "d"];
        let keep = [true, false, true, false];
        let removed = set.compact(&keep);
        compact_in_place(&mut payloads, &keep);
        assert_eq!(removed, vec![1, 3]);
        assert_eq!(payloads, vec!["a", "c"]);
        assert_eq!(set.live_count(), 2);
        assert_eq!(set.original_index(0), 0);
        assert_eq!(set.original_index(1), 2);
    }

    #[test]
    fn compaction_with_nothing_finished_is_identity() {
        let mut set = ActiveSet::new(3);
        let keep = [true, true, true];
        assert!(set.compact(&keep).is_empty());
        assert_eq!(set.live_count(), 3);
    }

    #[test]
    fn compaction_of_all_slots_empties_the_set() {
        let mut set = ActiveSet::new(2);
        let mut buffer = vec![1.0, 2.0, 3.0, 4.0];
        let keep = [false, false];
        let removed = set.compact(&keep);
        compact_rows(&mut buffer, 2, &keep);
        assert_eq!(removed, vec![0, 1]);
        assert_eq!(set.live_count(), 0);
        assert!(buffer.is_empty());
    }

    #[test]
    fn row_compaction_moves_live_rows_down() {
        let mut buffer = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        compact_rows(&mut buffer, 2, &[false, true, true]);
        assert_eq!(buffer, vec![3.0, 4.0, 5.0, 6.0]);
    }

    fn dummy_result(norm: f64) -> RecoveryResult {
        RecoveryResult {
            coefficients: vec![0.0],
            support: vec![],
            residual_norm: norm,
            iterations: 0,
            flag: RecoveryFlag::Completed,
        }
    }

    #[test]
    fn captured_results_are_immutable_and_complete() {
        let mut sink = ResultSink::new(2);
        sink.capture(1, dummy_result(0.25)).unwrap();
        assert!(sink.is_captured(1));
        assert_eq!(
            sink.capture(1, dummy_result(0.5)),
            Err(OmpError::DoubleCapture { index: 1 })
        );
        assert_eq!(sink.get(1).unwrap().residual_norm, 0.25);
        sink.capture(0, dummy_result(1.0)).unwrap();
        let results = sink.finish().unwrap();
        assert_eq!(results[0].residual_norm, 1.0);
        assert_eq!(results[1].residual_norm, 0.25);
    }

    #[test]
    fn finish_reports_missing_results() {
        let sink = ResultSink::new(2);
        assert_eq!(sink.finish(), Err(OmpError::MissingResult { index: 0 }));
    }
}
