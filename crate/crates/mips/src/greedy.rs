//! Greedy candidate screening: one cursor per dimension into the signed row
//! order, popping the globally largest q_j * x_ij via a d-way max-selection.
//! Relies on the bound x_i . q <= d max_j q_j x_ij, so rows popped early are
//! plausible top candidates.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::index::MipsIndex;
use crate::rank::CandidateSet;
use crate::ScreeningMethod;

#[derive(Debug, Clone, Copy)]
struct Cursor {
    score: f64,
    dim: u32,
    pos: u32,
}

impl Ord for Cursor {
    fn cmp(&self, other: &Self) -> Ordering {
        self.score
            .total_cmp(&other.score)
            .then_with(|| other.dim.cmp(&self.dim))
    }
}

impl PartialOrd for Cursor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Cursor {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Cursor {}

/// Iterator over greedy pops `(row, score)` in non-increasing score order.
/// Rows repeat when several dimensions favor them; each dimension yields each
/// row exactly once.
pub struct GreedyScan<'a> {
    index: &'a MipsIndex,
    q: &'a [f32],
    heap: BinaryHeap<Cursor>,
}

impl<'a> GreedyScan<'a> {
    /// Row and score at a cursor position. Positive query entries walk the
    /// signed order from the maximum end, negative ones from the minimum end.
    fn at(&self, dim: u32, pos: u32) -> (u32, f64) {
        let order = self.index.signed_order(dim as usize);
        let q_j = self.q[dim as usize] as f64;
        let row = if q_j > 0.0 {
            order[pos as usize]
        } else {
            order[order.len() - 1 - pos as usize]
        };
        let x = self.index.data().get(row as usize, dim as usize) as f64;
        (row, q_j * x)
    }
}

impl Iterator for GreedyScan<'_> {
    type Item = (u32, f64);

    fn next(&mut self) -> Option<(u32, f64)> {
        let top = self.heap.pop()?;
        let (row, score) = self.at(top.dim, top.pos);
        debug_assert_eq!(score, top.score);
        let next_pos = top.pos + 1;
        if (next_pos as usize) < self.index.n() {
            let (_, next_score) = self.at(top.dim, next_pos);
            self.heap.push(Cursor {
                score: next_score,
                dim: top.dim,
                pos: next_pos,
            });
        }
        Some((row, score))
    }
}

/// Starts a greedy scan. Dimensions with q_j = 0 contribute nothing.
pub fn greedy_scan<'a>(index: &'a MipsIndex, q: &'a [f32]) -> GreedyScan<'a> {
    assert_eq!(q.len(), index.d());
    let mut scan = GreedyScan {
        index,
        q,
        heap: BinaryHeap::new(),
    };
    for dim in 0..index.d() as u32 {
        if q[dim as usize] == 0.0 {
            continue;
        }
        let (_, score) = scan.at(dim, 0);
        scan.heap.push(Cursor {
            score,
            dim,
            pos: 0,
        });
    }
    scan
}

/// The first `b` distinct rows popped by the greedy scan. An all-zero query
/// has no cursors and yields an empty set.
pub fn greedy_candidates(index: &MipsIndex, q: &[f32], b: usize) -> CandidateSet {
    let mut seen = vec![false; index.n()];
    let mut rows = Vec::with_capacity(b.min(index.n()));
    for (row, _) in greedy_scan(index, q) {
        if !seen[row as usize] {
            seen[row as usize] = true;
            rows.push(row);
            if rows.len() == b {
                break;
            }
        }
    }
    CandidateSet::new(rows, ScreeningMethod::Greedy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::build_index;
    use crate::matrix::DataMatrix;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn index_from(rows: &[&[f32]]) -> MipsIndex {
        build_index(Arc::new(
            DataMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap(),
        ))
    }

    #[test]
    fn both_heads_point_at_dominant_row() {
        let index = index_from(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let c = greedy_candidates(&index, &[1.0, 1.0], 1);
        assert_eq!(c.rows(), &[1]);
    }

    #[test]
    fn negative_query_walks_from_minimum_end() {
        // dim 1 cursor starts at x = -2 (score +2); the first pop is dim 0's
        // head (score 3), the second pop introduces row 0.
        let index = index_from(&[&[1.0, -2.0], &[3.0, 4.0]]);
        let pops: Vec<(u32, f64)> = greedy_scan(&index, &[1.0, -1.0]).take(2).collect();
        assert_eq!(pops[0], (1, 3.0));
        assert_eq!(pops[1], (0, 2.0));
        let c = greedy_candidates(&index, &[1.0, -1.0], 2);
        assert_eq!(c.rows(), &[1, 0]);
    }

    #[test]
    fn exhaustive_b_returns_each_row_once() {
        let index = index_from(&[&[1.0, -2.0], &[3.0, 4.0], &[-0.5, 0.1]]);
        let c = greedy_candidates(&index, &[0.7, -0.3], 100);
        let mut rows = c.rows().to_vec();
        rows.sort_unstable();
        assert_eq!(rows, vec![0, 1, 2]);
    }

    #[test]
    fn zero_query_yields_empty_set() {
        let index = index_from(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert!(greedy_candidates(&index, &[0.0, 0.0], 3).is_empty());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        // The upper bound d max_j q_j x_ij >= x_i . q holds for every row,
        // and pops come out in non-increasing score order.
        #[test]
        fn bound_and_pop_order(
            seed in any::<u64>(),
            n in 1usize..40,
            d in 1usize..6,
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let values: Vec<f32> =
                (0..n * d).map(|_| rng.random_range(-2.0f32..2.0)).collect();
            let data = Arc::new(DataMatrix::from_vec(n, d, values).unwrap());
            let index = build_index(Arc::clone(&data));
            let q: Vec<f32> = (0..d).map(|_| rng.random_range(-1.0f32..1.0)).collect();

            for i in 0..n {
                let max_term = (0..d)
                    .map(|j| q[j] as f64 * data.get(i, j) as f64)
                    .fold(f64::NEG_INFINITY, f64::max);
                let product = data.dot(i, &q);
                prop_assert!(d as f64 * max_term >= product - 1e-9);
            }

            let scores: Vec<f64> = greedy_scan(&index, &q).map(|(_, s)| s).collect();
            prop_assert!(scores.windows(2).all(|w| w[0] >= w[1]));
            let nonzero_dims = q.iter().filter(|&&v| v != 0.0).count();
            prop_assert_eq!(scores.len(), n * nonzero_dims);
        }
    }
}
