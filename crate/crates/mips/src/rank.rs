//! Screening-to-ranking handoff: extract the top-B counters, re-rank the
//! candidates by exact inner product, and the exact brute-force oracle.
//!
//! One tie rule everywhere: higher score first, equal scores prefer the
//! smaller row index. It makes every result deterministic.

use std::cmp::Ordering;
use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::histogram::Histogram;
use crate::matrix::DataMatrix;
use crate::ScreeningMethod;

/// A row with a score; the ordering is (score descending, row ascending).
#[derive(Debug, Clone, Copy)]
pub(crate) struct ScoredRow {
    pub score: f64,
    pub row: u32,
}

impl Ord for ScoredRow {
    fn cmp(&self, other: &Self) -> Ordering {
        // `+ 0.0` folds -0.0 into +0.0 so total_cmp treats them as equal.
        (self.score + 0.0)
            .total_cmp(&(other.score + 0.0))
            .then_with(|| other.row.cmp(&self.row))
    }
}

impl PartialOrd for ScoredRow {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for ScoredRow {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ScoredRow {}

/// Selects the `limit` best entries, best first, using a size-`limit`
/// min-heap: O(len log limit), independent of input order.
pub(crate) fn select_top(
    entries: impl Iterator<Item = ScoredRow>,
    limit: usize,
) -> Vec<ScoredRow> {
    if limit == 0 {
        return Vec::new();
    }
    let mut heap: BinaryHeap<Reverse<ScoredRow>> = BinaryHeap::with_capacity(limit + 1);
    for entry in entries {
        if heap.len() < limit {
            heap.push(Reverse(entry));
        } else if entry > heap.peek().expect("non-empty heap").0 {
            heap.pop();
            heap.push(Reverse(entry));
        }
    }
    heap.into_sorted_vec().into_iter().map(|r| r.0).collect()
}

/// Rows that survived screening, ordered by descending counter value
/// (ties by ascending row index) or by pop order for cursor-based screeners.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    rows: Vec<u32>,
    origin: ScreeningMethod,
}

impl CandidateSet {
    pub fn new(rows: Vec<u32>, origin: ScreeningMethod) -> Self {
        Self { rows, origin }
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn origin(&self) -> ScreeningMethod {
        self.origin
    }
}

/// Exact top-k: rows with their inner products, descending, ties by
/// ascending row index. May hold fewer than k entries when the candidate
/// pool is smaller.
#[derive(Debug, Clone, PartialEq)]
pub struct TopKResult {
    entries: Vec<(u32, f64)>,
}

impl TopKResult {
    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn rows(&self) -> impl Iterator<Item = u32> + '_ {
        self.entries.iter().map(|&(r, _)| r)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// The B touched rows with the largest signed counters. Untouched rows are
/// never candidates, even when `b` exceeds the touched count: screening can
/// only rank what it sampled.
pub fn extract_top_b(hist: &Histogram, b: usize) -> CandidateSet {
    if b == 0 {
        return CandidateSet::new(Vec::new(), hist.origin());
    }
    let mut heap: BinaryHeap<Reverse<ScoredRow>> = BinaryHeap::with_capacity(b + 1);
    hist.for_each(|row, counter| {
        let entry = ScoredRow {
            score: counter,
            row,
        };
        if heap.len() < b {
            heap.push(Reverse(entry));
        } else if entry > heap.peek().expect("non-empty heap").0 {
            heap.pop();
            heap.push(Reverse(entry));
        }
    });
    let rows = heap
        .into_sorted_vec()
        .into_iter()
        .map(|r| r.0.row)
        .collect();
    CandidateSet::new(rows, hist.origin())
}

/// Exact inner products for every candidate, then the top-k under the tie
/// rule. Empty candidates give an empty result.
pub fn rank_candidates(
    data: &DataMatrix,
    q: &[f32],
    candidates: &CandidateSet,
    k: usize,
) -> TopKResult {
    let selected = select_top(
        candidates.rows().iter().map(|&row| ScoredRow {
            score: data.dot(row as usize, q),
            row,
        }),
        k,
    );
    TopKResult {
        entries: selected.into_iter().map(|e| (e.row, e.score)).collect(),
    }
}

/// Exact top-k over all rows: the ground-truth oracle and the brute-force
/// baseline.
pub fn brute_force_topk(data: &DataMatrix, q: &[f32], k: usize) -> TopKResult {
    let selected = select_top(
        (0..data.n() as u32).map(|row| ScoredRow {
            score: data.dot(row as usize, q),
            row,
        }),
        k,
    );
    TopKResult {
        entries: selected.into_iter().map(|e| (e.row, e.score)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::build_index;
    use crate::query::make_query_context;
    use crate::samplers::{dwedge_sample, wedge_sample};
    use crate::rng::SamplerRng;
    use proptest::prelude::*;
    use std::collections::HashSet;
    use std::sync::Arc;

    fn data_2x2() -> DataMatrix {
        DataMatrix::from_vec(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap()
    }

    fn hist(counters: &[(u32, f64)]) -> Histogram {
        let mut h = Histogram::sparse(ScreeningMethod::DWedge);
        for &(row, v) in counters {
            h.add(row, v);
        }
        h
    }

    #[test]
    fn extract_takes_largest_counter() {
        let c = extract_top_b(&hist(&[(1, 3.0), (2, 7.0)]), 1);
        assert_eq!(c.rows(), &[2]);
    }

    #[test]
    fn extract_breaks_ties_by_row() {
        let c = extract_top_b(&hist(&[(1, 5.0), (2, 5.0)]), 1);
        assert_eq!(c.rows(), &[1]);
    }

    #[test]
    fn extract_with_large_b_returns_all_touched_sorted() {
        let c = extract_top_b(&hist(&[(3, 1.0), (0, 9.0), (7, -2.0)]), 10);
        assert_eq!(c.rows(), &[0, 3, 7]);
    }

    #[test]
    fn extract_from_empty_histogram() {
        let c = extract_top_b(&hist(&[]), 5);
        assert!(c.is_empty());
    }

    #[test]
    fn rank_reorders_by_exact_product() {
        let data = data_2x2();
        let cands = CandidateSet::new(vec![0, 1], ScreeningMethod::DWedge);
        let top = rank_candidates(&data, &[1.0, 1.0], &cands, 1);
        assert_eq!(top.entries(), &[(1, 7.0)]);
    }

    #[test]
    fn rank_returns_short_result_when_candidates_scarce() {
        let data = data_2x2();
        let cands = CandidateSet::new(vec![0], ScreeningMethod::DWedge);
        let top = rank_candidates(&data, &[1.0, 1.0], &cands, 5);
        assert_eq!(top.entries(), &[(0, 3.0)]);
    }

    #[test]
    fn rank_zero_query_orders_by_index() {
        let data = data_2x2();
        let cands = CandidateSet::new(vec![1, 0], ScreeningMethod::DWedge);
        let top = rank_candidates(&data, &[0.0, 0.0], &cands, 2);
        assert_eq!(top.entries(), &[(0, 0.0), (1, 0.0)]);
    }

    #[test]
    fn rank_empty_candidates_empty_result() {
        let data = data_2x2();
        let cands = CandidateSet::new(vec![], ScreeningMethod::DWedge);
        assert!(rank_candidates(&data, &[1.0, 1.0], &cands, 3).is_empty());
    }

    #[test]
    fn brute_force_full_ranking() {
        let data = data_2x2();
        let top = brute_force_topk(&data, &[1.0, 1.0], 2);
        assert_eq!(top.entries(), &[(1, 7.0), (0, 3.0)]);
    }

    #[test]
    fn brute_force_duplicate_rows_prefer_lower_index() {
        let data = DataMatrix::from_vec(3, 2, vec![3.0, 4.0, 1.0, 1.0, 3.0, 4.0]).unwrap();
        let top = brute_force_topk(&data, &[1.0, 1.0], 2);
        assert_eq!(top.entries(), &[(0, 7.0), (2, 7.0)]);
    }

    #[test]
    fn operations_are_deterministic() {
        let h = hist(&[(4, 2.0), (9, 2.0), (1, -1.0), (6, 8.0)]);
        let a = extract_top_b(&h, 3);
        let b = extract_top_b(&h, 3);
        assert_eq!(a, b);
        assert_eq!(a.rows(), &[6, 4, 9]);
    }

    fn random_instance(
        seed: u64,
        n: usize,
        d: usize,
    ) -> (crate::index::MipsIndex, Vec<f32>) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let values: Vec<f32> = (0..n * d).map(|_| rng.random_range(-2.0f32..2.0)).collect();
        let data = Arc::new(DataMatrix::from_vec(n, d, values).unwrap());
        let q: Vec<f32> = (0..d).map(|_| rng.random_range(-1.0f32..1.0)).collect();
        (build_index(data), q)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        // Candidate lists are prefix-monotone in B, so growing B never
        // drops a true top-k member from the re-ranked result.
        #[test]
        fn larger_b_preserves_winners(
            seed in any::<u64>(),
            n in 4usize..60,
            d in 1usize..5,
            k in 1usize..5,
        ) {
            let (index, q) = random_instance(seed, n, d);
            let ctx = make_query_context(&index, &q, 64).unwrap();
            prop_assume!(!ctx.is_degenerate());
            let h = wedge_sample(&index, &ctx, 64, &mut SamplerRng::new(seed));
            prop_assume!(!h.is_empty());

            let truth: HashSet<u32> =
                brute_force_topk(index.data(), &q, k).rows().collect();
            let mut prev_hits: Option<HashSet<u32>> = None;
            let mut prev_rows: Option<Vec<u32>> = None;
            for b in [1usize, 2, 4, 8, n] {
                let cands = extract_top_b(&h, b);
                if let Some(prev) = &prev_rows {
                    prop_assert_eq!(&cands.rows()[..prev.len()], &prev[..]);
                }
                let result = rank_candidates(index.data(), &q, &cands, k);
                let hits: HashSet<u32> =
                    result.rows().filter(|r| truth.contains(r)).collect();
                if let Some(prev) = &prev_hits {
                    prop_assert!(prev.is_subset(&hits));
                }
                prev_hits = Some(hits);
                prev_rows = Some(cands.rows().to_vec());
            }
        }

        // With B = n and a column-exhausting budget, dWedge's candidates
        // cover every row, so re-ranking reproduces the exact oracle.
        #[test]
        fn dwedge_oracle_equivalence(
            seed in any::<u64>(),
            n in 2usize..40,
            d in 1usize..4,
            k in 1usize..6,
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let values: Vec<f32> = (0..n * d)
                .map(|_| {
                    let v = rng.random_range(0.25f32..2.0);
                    if rng.random_bool(0.5) { -v } else { v }
                })
                .collect();
            let data = Arc::new(DataMatrix::from_vec(n, d, values).unwrap());
            let index = build_index(data);
            let q: Vec<f32> = (0..d)
                .map(|_| {
                    let v = rng.random_range(0.25f32..1.0);
                    if rng.random_bool(0.5) { -v } else { v }
                })
                .collect();

            // Budget large enough that every column walk reaches its last
            // row: s_j must exceed (n-1) c_j / min_i |x_ij| for every j.
            let ctx0 = make_query_context(&index, &q, 0).unwrap();
            let mut required = 0.0f64;
            for j in 0..d {
                let min_abs = index
                    .data()
                    .column(j)
                    .map(|v| (v as f64).abs())
                    .fold(f64::INFINITY, f64::min);
                let need = (n - 1) as f64 * ctx0.z() / ((q[j] as f64).abs() * min_abs);
                required = required.max(need);
            }
            let samples = required.ceil() as u64 + 1;
            let ctx = make_query_context(&index, &q, samples).unwrap();
            let h = dwedge_sample(&index, &ctx, samples);
            prop_assert_eq!(h.touched(), n);
            let cands = extract_top_b(&h, n);
            let approx = rank_candidates(index.data(), &q, &cands, k);
            let exact = brute_force_topk(index.data(), &q, k);
            prop_assert_eq!(approx, exact);
        }
    }
}
