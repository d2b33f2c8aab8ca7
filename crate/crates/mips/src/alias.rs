//! Walker/Vose alias tables: O(n) construction, O(1) sampling from a fixed
//! discrete distribution.

use crate::rng::SamplerRng;

/// Alias table over `n` outcomes. Cell `k` holds a cutoff probability and an
/// alias target; a sample picks a uniform cell and keeps it with the cutoff
/// probability, otherwise returns the alias.
#[derive(Debug, Clone, PartialEq)]
pub struct AliasTable {
    prob: Vec<f64>,
    alias: Vec<u32>,
}

impl AliasTable {
    /// Builds a table proportional to `weights`. Returns `None` when the
    /// weights are empty or sum to zero (nothing to sample).
    ///
    /// Construction is deterministic: the small/large worklists are plain
    /// stacks filled in index order, so the same weights always produce the
    /// same cells.
    pub fn new(weights: &[f64]) -> Option<Self> {
        let n = weights.len();
        let total: f64 = weights.iter().sum();
        if n == 0 || !(total > 0.0) {
            return None;
        }
        let scale = n as f64 / total;
        let mut scaled: Vec<f64> = weights.iter().map(|w| w * scale).collect();
        let mut prob = vec![0.0f64; n];
        let mut alias: Vec<u32> = (0..n as u32).collect();

        let mut small: Vec<u32> = Vec::new();
        let mut large: Vec<u32> = Vec::new();
        for (i, &s) in scaled.iter().enumerate() {
            if s < 1.0 {
                small.push(i as u32);
            } else {
                large.push(i as u32);
            }
        }

        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            let (s, l) = (s as usize, l as usize);
            prob[s] = scaled[s];
            alias[s] = l as u32;
            scaled[l] = (scaled[l] + scaled[s]) - 1.0;
            if scaled[l] < 1.0 {
                large.pop();
                small.push(l as u32);
            }
        }
        // Leftovers on either list are exactly 1 up to rounding.
        for &i in large.iter().chain(small.iter()) {
            prob[i as usize] = 1.0;
            alias[i as usize] = i;
        }

        Some(Self { prob, alias })
    }

    pub fn len(&self) -> usize {
        self.prob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prob.is_empty()
    }

    /// Draws one outcome.
    #[inline]
    pub fn sample(&self, rng: &mut SamplerRng) -> usize {
        let k = rng.below(self.prob.len());
        if rng.uniform() < self.prob[k] {
            k
        } else {
            self.alias[k] as usize
        }
    }

    /// Raw cells `(cutoff, alias)`, used for serialization and enumeration.
    pub fn cells(&self) -> impl Iterator<Item = (f64, u32)> + '_ {
        self.prob.iter().copied().zip(self.alias.iter().copied())
    }

    /// Rebuilds a table from previously stored cells.
    pub fn from_cells(prob: Vec<f64>, alias: Vec<u32>) -> Self {
        assert_eq!(prob.len(), alias.len());
        Self { prob, alias }
    }

    /// The exact distribution the table implements, by enumerating every cell.
    pub fn implied_distribution(&self) -> Vec<f64> {
        let n = self.prob.len();
        let mut out = vec![0.0f64; n];
        let inv = 1.0 / n as f64;
        for k in 0..n {
            out[k] += self.prob[k] * inv;
            out[self.alias[k] as usize] += (1.0 - self.prob[k]) * inv;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn two_outcome_table_is_exact() {
        let t = AliasTable::new(&[1.0, 3.0]).unwrap();
        let implied = t.implied_distribution();
        assert!(max_abs_diff(&implied, &[0.25, 0.75]) < 1e-15);
    }

    #[test]
    fn zero_weights_rejected() {
        assert!(AliasTable::new(&[]).is_none());
        assert!(AliasTable::new(&[0.0, 0.0]).is_none());
    }

    #[test]
    fn single_outcome_always_sampled() {
        let t = AliasTable::new(&[2.5]).unwrap();
        let mut rng = SamplerRng::new(1);
        for _ in 0..32 {
            assert_eq!(t.sample(&mut rng), 0);
        }
    }

    #[test]
    fn zero_weight_outcome_never_sampled() {
        let t = AliasTable::new(&[0.0, 1.0, 1.0]).unwrap();
        let mut rng = SamplerRng::new(7);
        for _ in 0..10_000 {
            assert_ne!(t.sample(&mut rng), 0);
        }
        assert!(t.implied_distribution()[0].abs() < 1e-15);
    }

    #[test]
    fn empirical_frequencies_converge() {
        let weights = [0.5, 1.5, 2.0, 4.0];
        let total: f64 = weights.iter().sum();
        let t = AliasTable::new(&weights).unwrap();
        let mut rng = SamplerRng::new(99);
        let draws = 200_000;
        let mut counts = [0u64; 4];
        for _ in 0..draws {
            counts[t.sample(&mut rng)] += 1;
        }
        for (i, &w) in weights.iter().enumerate() {
            let freq = counts[i] as f64 / draws as f64;
            assert!((freq - w / total).abs() < 0.01, "outcome {i}: {freq}");
        }
    }

    proptest! {
        // Enumerating all cells recovers the normalized weights exactly
        // (up to f64 rounding) for any small distribution.
        #[test]
        fn implied_distribution_matches_weights(
            weights in prop::collection::vec(0.0f64..1000.0, 1..64)
        ) {
            let total: f64 = weights.iter().sum();
            prop_assume!(total > 1e-9);
            let t = AliasTable::new(&weights).unwrap();
            let implied = t.implied_distribution();
            let expected: Vec<f64> = weights.iter().map(|w| w / total).collect();
            prop_assert!(max_abs_diff(&implied, &expected) < 1e-12);
        }

        #[test]
        fn construction_is_deterministic(
            weights in prop::collection::vec(0.0f64..100.0, 1..40)
        ) {
            prop_assume!(weights.iter().sum::<f64>() > 1e-9);
            let a = AliasTable::new(&weights).unwrap();
            let b = AliasTable::new(&weights).unwrap();
            prop_assert!(a.cells().eq(b.cells()));
        }
    }
}
