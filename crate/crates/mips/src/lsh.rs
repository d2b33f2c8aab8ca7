//! SimpleLSH baseline: an order-preserving augmentation to unit-norm vectors
//! followed by sign-random-projection codes, ranked by Hamming distance.
//!
//! Data rows map to (x/m, sqrt(1 - ||x||^2/m^2)) in d+1 dimensions, where m
//! is the maximum row 2-norm; queries map to (q/||q||, 0). Transformed inner
//! products equal (x . q)/(m ||q||), so the inner-product order is preserved
//! while every vector becomes unit-norm, which is what sign-projection
//! hashing requires.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;
use crate::rank::{select_top, CandidateSet, ScoredRow};
use crate::rng::SamplerRng;
use crate::ScreeningMethod;

/// Code-based SimpleLSH model: hyperplanes and per-row sign codes.
#[derive(Debug, Clone)]
pub struct LshModel {
    n: usize,
    d: usize,
    m: f64,
    h: usize,
    words: usize,
    /// h hyperplanes in d+1 dimensions, row-major.
    hyperplanes: Vec<f64>,
    /// n packed codes of `words` u64 each.
    codes: Vec<u64>,
    /// Augmented coordinate of each transformed row.
    aug: Vec<f64>,
}

/// Builds the model: draws h Gaussian hyperplanes in d+1 dimensions from the
/// seed and encodes every transformed row. Rejects degenerate data (m = 0).
pub fn lsh_build(data: &DataMatrix, h: usize, seed: u64) -> Result<LshModel> {
    if h == 0 {
        return Err(Error::InvalidParameter(
            "code length h must be at least 1".into(),
        ));
    }
    let m = (0..data.n())
        .map(|i| data.row_norm2(i))
        .fold(0.0, f64::max);
    if !(m > 0.0) {
        return Err(Error::InvalidParameter(
            "all rows have zero norm; SimpleLSH transform is undefined".into(),
        ));
    }

    let d = data.d();
    let mut rng = SamplerRng::new(seed);
    let hyperplanes: Vec<f64> = (0..h * (d + 1))
        .map(|_| rng.sample(StandardNormal))
        .collect();

    let words = h.div_ceil(64);
    let mut model = LshModel {
        n: data.n(),
        d,
        m,
        h,
        words,
        hyperplanes,
        codes: Vec::with_capacity(data.n() * words),
        aug: Vec::with_capacity(data.n()),
    };
    for i in 0..data.n() {
        let t = model.transform_row(data.row(i));
        model.aug.push(t[d]);
        let code = model.encode(&t);
        model.codes.extend_from_slice(&code);
    }
    Ok(model)
}

impl LshModel {
    pub fn max_norm(&self) -> f64 {
        self.m
    }

    pub fn code_bits(&self) -> usize {
        self.h
    }

    pub fn rows(&self) -> usize {
        self.n
    }

    /// Augmented coordinate recorded for row `i`.
    pub fn augmented(&self, i: usize) -> f64 {
        self.aug[i]
    }

    /// Data-side transform to a unit-norm vector in d+1 dimensions.
    pub fn transform_row(&self, row: &[f32]) -> Vec<f64> {
        let mut out: Vec<f64> = row.iter().map(|&v| v as f64 / self.m).collect();
        let scaled_sq: f64 = out.iter().map(|v| v * v).sum();
        out.push((1.0 - scaled_sq).max(0.0).sqrt());
        out
    }

    /// Query-side transform: unit-normalized with augmented coordinate 0.
    /// A zero query maps to the zero vector.
    pub fn transform_query(&self, q: &[f32]) -> Vec<f64> {
        let norm: f64 = q.iter().map(|&v| (v as f64) * (v as f64)).sum::<f64>().sqrt();
        let scale = if norm > 0.0 { 1.0 / norm } else { 0.0 };
        let mut out: Vec<f64> = q.iter().map(|&v| v as f64 * scale).collect();
        out.push(0.0);
        out
    }

    /// Sign bits of the hyperplane projections, packed into u64 words.
    pub fn encode(&self, v: &[f64]) -> Vec<u64> {
        debug_assert_eq!(v.len(), self.d + 1);
        let mut code = vec![0u64; self.words];
        for r in 0..self.h {
            let plane = &self.hyperplanes[r * (self.d + 1)..(r + 1) * (self.d + 1)];
            let dot: f64 = plane.iter().zip(v).map(|(a, b)| a * b).sum();
            if dot >= 0.0 {
                code[r / 64] |= 1u64 << (r % 64);
            }
        }
        code
    }

    pub fn data_code(&self, i: usize) -> &[u64] {
        &self.codes[i * self.words..(i + 1) * self.words]
    }

    pub fn hamming(a: &[u64], b: &[u64]) -> u32 {
        a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones()).sum()
    }

    /// Top-B rows by ascending Hamming distance to the encoded query, ties
    /// by ascending row index.
    pub fn candidates(&self, q: &[f32], b: usize) -> CandidateSet {
        let qcode = self.encode(&self.transform_query(q));
        let selected = select_top(
            (0..self.n as u32).map(|row| ScoredRow {
                score: -(Self::hamming(self.data_code(row as usize), &qcode) as f64),
                row,
            }),
            b,
        );
        CandidateSet::new(
            selected.into_iter().map(|e| e.row).collect(),
            ScreeningMethod::SimpleLsh,
        )
    }
}

/// Free-function form of [`LshModel::candidates`].
pub fn lsh_candidates(model: &LshModel, q: &[f32], b: usize) -> CandidateSet {
    model.candidates(q, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn random_matrix(seed: u64, n: usize, d: usize) -> Arc<DataMatrix> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        Arc::new(
            DataMatrix::from_vec(
                n,
                d,
                (0..n * d).map(|_| rng.random_range(-2.0f32..2.0)).collect(),
            )
            .unwrap(),
        )
    }

    fn norm(v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    #[test]
    fn transformed_rows_are_unit_norm() {
        let data = random_matrix(1, 30, 8);
        let model = lsh_build(&data, 16, 7).unwrap();
        for i in 0..data.n() {
            let t = model.transform_row(data.row(i));
            assert!((norm(&t) - 1.0).abs() < 1e-6, "row {i}: {}", norm(&t));
        }
    }

    #[test]
    fn max_norm_row_has_zero_augmentation() {
        let data = Arc::new(
            DataMatrix::from_vec(2, 2, vec![3.0, 4.0, 1.0, 0.0]).unwrap(),
        );
        let model = lsh_build(&data, 8, 1).unwrap();
        assert_eq!(model.max_norm(), 5.0);
        assert!(model.augmented(0).abs() < 1e-9);
        assert!(model.augmented(1) > 0.9);
    }

    #[test]
    fn zero_row_maps_to_last_axis() {
        let data = Arc::new(
            DataMatrix::from_vec(2, 2, vec![0.0, 0.0, 3.0, 4.0]).unwrap(),
        );
        let model = lsh_build(&data, 8, 1).unwrap();
        let t = model.transform_row(data.row(0));
        assert_eq!(t, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn degenerate_data_rejected() {
        let data = Arc::new(DataMatrix::from_vec(2, 2, vec![0.0; 4]).unwrap());
        assert!(matches!(
            lsh_build(&data, 8, 1),
            Err(Error::InvalidParameter(_))
        ));
        let data = random_matrix(2, 4, 3);
        assert!(matches!(
            lsh_build(&data, 0, 1),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn transform_preserves_inner_product_order() {
        // transform(x) . transform(q) = (x . q) / (m ||q||): a fixed positive
        // scale, so the induced ranking matches the raw ranking exactly.
        let data = random_matrix(3, 12, 5);
        let model = lsh_build(&data, 8, 2).unwrap();
        let q: Vec<f32> = vec![0.4, -1.2, 0.3, 0.9, -0.5];
        let tq = model.transform_query(&q);
        let q_norm: f64 = q.iter().map(|&v| (v as f64) * (v as f64)).sum::<f64>().sqrt();
        for i in 0..data.n() {
            let t = model.transform_row(data.row(i));
            let transformed: f64 = t.iter().zip(&tq).map(|(a, b)| a * b).sum();
            let raw = data.dot(i, &q);
            assert!(
                (transformed - raw / (model.max_norm() * q_norm)).abs() < 1e-9,
                "row {i}"
            );
        }
    }

    #[test]
    fn planted_duplicate_ranks_first() {
        // Row 5 is a scalar multiple of the query with the largest inner
        // product, hence the smallest transformed angle; with a long code
        // its Hamming distance is far below everyone else's.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let d = 10;
        let q: Vec<f32> = (0..d).map(|_| rng.random_range(-1.0f32..1.0)).collect();
        let mut rows: Vec<Vec<f32>> = (0..20)
            .map(|_| (0..d).map(|_| rng.random_range(-1.0f32..1.0)).collect())
            .collect();
        rows[5] = q.iter().map(|&v| v * 1.5).collect();
        let data = Arc::new(DataMatrix::from_rows(rows).unwrap());
        let model = lsh_build(&data, 4096, 23).unwrap();
        let c = model.candidates(&q, 3);
        assert_eq!(c.rows()[0], 5);
    }

    #[test]
    fn identical_codes_rank_by_index() {
        let data = Arc::new(
            DataMatrix::from_vec(3, 2, vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0]).unwrap(),
        );
        let model = lsh_build(&data, 32, 9).unwrap();
        let c = model.candidates(&[1.0, 1.0], 3);
        assert_eq!(c.rows(), &[0, 1, 2]);
    }

    #[test]
    fn b_of_n_returns_all_rows() {
        let data = random_matrix(4, 9, 4);
        let model = lsh_build(&data, 16, 3).unwrap();
        let c = model.candidates(&[1.0, 0.0, -1.0, 0.5], 9);
        assert_eq!(c.len(), 9);
    }

    #[test]
    fn build_is_deterministic() {
        let data = random_matrix(5, 15, 6);
        let a = lsh_build(&data, 64, 11).unwrap();
        let b = lsh_build(&data, 64, 11).unwrap();
        assert_eq!(a.codes, b.codes);
        let c = lsh_build(&data, 64, 12).unwrap();
        assert_ne!(a.codes, c.codes);
    }
}
