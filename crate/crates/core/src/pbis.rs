//! Pattern-based index selection.
//!
//! Each index value is reduced to a pair of abnormality flags (below / above
//! its normal range). The coefficient of similarity between two indices is
//!
//! ```text
//! COS(i, j) = 2 − Σ_k (|Lo_i − Lo_j| + |Hi_i − Hi_j|) / n
//! ```
//!
//! and selection repeatedly drops the index most similar to the rest.

use alloc::vec::Vec;

use crate::data::{CbcIndex, Cohort, NormalRange, NormalRanges};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PbisError {
    #[error("target count {k} must be in 2..={available}")]
    TargetOutOfRange { k: usize, available: usize },
    #[error("candidate {0} listed twice")]
    DuplicateCandidate(CbcIndex),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AbnormalityFlags {
    pub low: bool,
    pub high: bool,
}

/// Boundary values count as normal.
pub fn flags(value: f64, range: NormalRange) -> AbnormalityFlags {
    AbnormalityFlags { low: value < range.low(), high: value > range.high() }
}

fn disagreement(a: AbnormalityFlags, b: AbnormalityFlags) -> usize {
    (a.low != b.low) as usize + (a.high != b.high) as usize
}

/// Σ_k of the per-sample disagreement between indices `i` and `j` (0..=2n).
fn total_disagreement(cohort: &Cohort, i: CbcIndex, j: CbcIndex, ranges: &NormalRanges) -> usize {
    cohort
        .iter()
        .map(|s| disagreement(flags(s.value(i), ranges.get(i)), flags(s.value(j), ranges.get(j))))
        .sum()
}

pub fn cos(cohort: &Cohort, i: CbcIndex, j: CbcIndex, ranges: &NormalRanges) -> f64 {
    2.0 - total_disagreement(cohort, i, j, ranges) as f64 / cohort.len() as f64
}

/// Symmetric COS matrix over a candidate list.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    indices: Vec<CbcIndex>,
    samples: usize,
    // Integer disagreement totals; COS = 2 − d/n.
    disagreement: Vec<usize>,
}

impl SimilarityMatrix {
    pub fn compute(cohort: &Cohort, candidates: &[CbcIndex], ranges: &NormalRanges) -> Self {
        let m = candidates.len();
        let mut disagreement = alloc::vec![0; m * m];
        for a in 0..m {
            for b in a + 1..m {
                let d = total_disagreement(cohort, candidates[a], candidates[b], ranges);
                disagreement[a * m + b] = d;
                disagreement[b * m + a] = d;
            }
        }
        Self { indices: candidates.to_vec(), samples: cohort.len(), disagreement }
    }

    pub fn indices(&self) -> &[CbcIndex] {
        &self.indices
    }

    /// COS between the `a`-th and `b`-th candidates.
    pub fn get(&self, a: usize, b: usize) -> f64 {
        2.0 - self.disagreement[a * self.indices.len() + b] as f64 / self.samples as f64
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    fn slot(&self, index: CbcIndex) -> Option<usize> {
        self.indices.iter().position(|&i| i == index)
    }
}

/// Total COS over unordered pairs of `subset`; NaN if a member is not in the
/// matrix.
pub fn similarity_matrix_total(matrix: &SimilarityMatrix, subset: &[CbcIndex]) -> f64 {
    let mut total = 0.0;
    for (p, &a) in subset.iter().enumerate() {
        for &b in &subset[p + 1..] {
            match (matrix.slot(a), matrix.slot(b)) {
                (Some(x), Some(y)) => total += matrix.get(x, y),
                _ => return f64::NAN,
            }
        }
    }
    total
}

/// Greedy backward elimination down to `k` indices.
///
/// Each round removes the remaining index with the greatest total COS
/// against the other remaining indices. Ties remove the index that comes
/// latest in canonical order. The result is returned in canonical order.
pub fn select_indices(
    cohort: &Cohort,
    candidates: &[CbcIndex],
    k: usize,
    ranges: &NormalRanges,
) -> Result<Vec<CbcIndex>, PbisError> {
    for (p, c) in candidates.iter().enumerate() {
        if candidates[..p].contains(c) {
            return Err(PbisError::DuplicateCandidate(*c));
        }
    }
    if k < 2 || k > candidates.len() {
        return Err(PbisError::TargetOutOfRange { k, available: candidates.len() });
    }
    let mut sorted = candidates.to_vec();
    sorted.sort_unstable();
    let matrix = SimilarityMatrix::compute(cohort, &sorted, ranges);
    let m = sorted.len();
    let mut alive: Vec<usize> = (0..m).collect();
    while alive.len() > k {
        // Maximizing total COS is minimizing total disagreement, which is an
        // exact integer comparison.
        let mut victim = 0;
        let mut victim_total = usize::MAX;
        for (pos, &a) in alive.iter().enumerate() {
            let total: usize = alive.iter().map(|&b| matrix.disagreement[a * m + b]).sum();
            if total <= victim_total {
                victim = pos;
                victim_total = total;
            }
        }
        alive.remove(victim);
    }
    Ok(alive.into_iter().map(|a| sorted[a]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::table2_fixture;

    #[test]
    fn flag_examples() {
        let r = NormalRanges::default();
        assert_eq!(flags(62.6, r.get(CbcIndex::Mcv)), AbnormalityFlags { low: true, high: false });
        assert_eq!(flags(6.8, r.get(CbcIndex::Rbc)), AbnormalityFlags { low: false, high: true });
        assert_eq!(flags(13.5, r.get(CbcIndex::Hb)), AbnormalityFlags::default());
        assert_eq!(flags(18.0, r.get(CbcIndex::Hb)), AbnormalityFlags::default());
    }

    #[test]
    fn self_similarity_is_two() {
        let f = table2_fixture();
        for i in CbcIndex::ALL {
            assert_eq!(cos(&f, i, i, &NormalRanges::default()), 2.0);
        }
    }

    #[test]
    fn full_disagreement_is_zero() {
        use crate::data::{CbcSample, Label};
        // RBC always high, MCV always low: both flags disagree on every row.
        let s = CbcSample::new([7.0, 14.0, 40.0, 60.0, 28.0, 33.0], None, Some(Label::Btt), None).unwrap();
        let c = Cohort::new(alloc::vec![s.clone(), s], "t").unwrap();
        assert_eq!(cos(&c, CbcIndex::Rbc, CbcIndex::Mcv, &NormalRanges::default()), 0.0);
    }

    #[test]
    fn matrix_matches_pairwise_cos() {
        let f = table2_fixture();
        let r = NormalRanges::default();
        let m = SimilarityMatrix::compute(&f, &CbcIndex::ALL, &r);
        for (a, &i) in CbcIndex::ALL.iter().enumerate() {
            for (b, &j) in CbcIndex::ALL.iter().enumerate() {
                assert_eq!(m.get(a, b), cos(&f, i, j, &r));
            }
        }
        assert_eq!(m.get(1, 2), 1.6);
    }

    #[test]
    fn identity_when_k_equals_candidates() {
        let f = table2_fixture();
        let picked = select_indices(&f, &[CbcIndex::Mcv, CbcIndex::Rbc], 2, &NormalRanges::default()).unwrap();
        assert_eq!(picked, [CbcIndex::Rbc, CbcIndex::Mcv]);
    }

    #[test]
    fn reference_fixture_selection() {
        let f = table2_fixture();
        let picked = select_indices(&f, &CbcIndex::ALL, 4, &NormalRanges::default()).unwrap();
        assert_eq!(picked, [CbcIndex::Rbc, CbcIndex::Hb, CbcIndex::Hct, CbcIndex::Mcv]);
    }

    #[test]
    fn bad_targets() {
        let f = table2_fixture();
        let r = NormalRanges::default();
        assert_eq!(
            select_indices(&f, &CbcIndex::ALL, 7, &r),
            Err(PbisError::TargetOutOfRange { k: 7, available: 6 })
        );
        assert!(select_indices(&f, &CbcIndex::ALL, 1, &r).is_err());
        assert_eq!(
            select_indices(&f, &[CbcIndex::Hb, CbcIndex::Hb, CbcIndex::Mcv], 2, &r),
            Err(PbisError::DuplicateCandidate(CbcIndex::Hb))
        );
    }
}
