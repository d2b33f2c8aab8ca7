//! Synthetic dataset generators: i.i.d. Gaussian matrices and low-rank
//! factor products that mimic recommender factorizations.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;
use crate::rng::SamplerRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticModel {
    /// Entries i.i.d. standard normal.
    Gaussian,
    /// Rows are Gaussian factor combinations: X = U V with U of shape
    /// n x rank and V of shape rank x d, scaled by 1/sqrt(rank).
    LowRankFactors { rank: usize },
}

fn validate(model: SyntheticModel, n: usize, d: usize) -> Result<()> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidParameter(format!(
            "matrix shape {n}x{d} must be at least 1x1"
        )));
    }
    if let SyntheticModel::LowRankFactors { rank } = model {
        if rank == 0 || rank > d {
            return Err(Error::InvalidParameter(format!(
                "rank {rank} must be in 1..={d}"
            )));
        }
    }
    Ok(())
}

fn gaussian_vec(rng: &mut SamplerRng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}

/// Multiplies an m x rank Gaussian factor into the shared rank x d factor.
fn factor_product(rows: usize, d: usize, rank: usize, v: &[f64], rng: &mut SamplerRng) -> Vec<f32> {
    let scale = 1.0 / (rank as f64).sqrt();
    let mut values = Vec::with_capacity(rows * d);
    for _ in 0..rows {
        let u = gaussian_vec(rng, rank);
        for j in 0..d {
            let mut acc = 0.0;
            for (r, &u_r) in u.iter().enumerate() {
                acc += u_r * v[r * d + j];
            }
            values.push((acc * scale) as f32);
        }
    }
    values
}

/// Generates a data matrix; deterministic given `(model, n, d, seed)`.
pub fn gen_synthetic(model: SyntheticModel, n: usize, d: usize, seed: u64) -> Result<DataMatrix> {
    let (data, _) = gen_synthetic_pair(model, n, d, 0, seed)?;
    Ok(data)
}

/// Generates a data matrix plus a matching query set. For the low-rank model
/// both matrices share the same latent item factor, so queries correlate
/// with the data the way user vectors correlate with item vectors.
///
/// `num_queries = 0` yields an empty query option. Generation is
/// deterministic given the full parameter tuple, and the data matrix does
/// not depend on `num_queries`.
pub fn gen_synthetic_pair(
    model: SyntheticModel,
    n: usize,
    d: usize,
    num_queries: usize,
    seed: u64,
) -> Result<(DataMatrix, Option<DataMatrix>)> {
    validate(model, n, d)?;
    let mut rng = SamplerRng::new(seed);
    match model {
        SyntheticModel::Gaussian => {
            let values: Vec<f32> = (0..n * d)
                .map(|_| rng.sample::<f64, _>(StandardNormal) as f32)
                .collect();
            let data = DataMatrix::from_vec(n, d, values)?;
            let queries = if num_queries > 0 {
                let values: Vec<f32> = (0..num_queries * d)
                    .map(|_| rng.sample::<f64, _>(StandardNormal) as f32)
                    .collect();
                Some(DataMatrix::from_vec(num_queries, d, values)?)
            } else {
                None
            };
            Ok((data, queries))
        }
        SyntheticModel::LowRankFactors { rank } => {
            let v = gaussian_vec(&mut rng, rank * d);
            let data = DataMatrix::from_vec(n, d, factor_product(n, d, rank, &v, &mut rng))?;
            let queries = if num_queries > 0 {
                Some(DataMatrix::from_vec(
                    num_queries,
                    d,
                    factor_product(num_queries, d, rank, &v, &mut rng),
                )?)
            } else {
                None
            };
            Ok((data, queries))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_matrix() {
        let a = gen_synthetic(SyntheticModel::Gaussian, 20, 5, 42).unwrap();
        let b = gen_synthetic(SyntheticModel::Gaussian, 20, 5, 42).unwrap();
        assert_eq!(a, b);
        let c = gen_synthetic(SyntheticModel::Gaussian, 20, 5, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn column_means_concentrate() {
        let m = gen_synthetic(SyntheticModel::Gaussian, 1000, 50, 7).unwrap();
        let bound = 4.0 / (1000f64).sqrt();
        for j in 0..m.d() {
            let mean: f64 = m.column(j).map(|v| v as f64).sum::<f64>() / m.n() as f64;
            assert!(mean.abs() < bound, "column {j} mean {mean}");
        }
    }

    #[test]
    fn lowrank_matrix_has_bounded_numerical_rank() {
        let rank = 10;
        let m = gen_synthetic(
            SyntheticModel::LowRankFactors { rank },
            200,
            50,
            11,
        )
        .unwrap();
        let nm = nalgebra::DMatrix::from_fn(m.n(), m.d(), |i, j| m.get(i, j) as f64);
        let svd = nm.svd(false, false);
        let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        assert!(sv[rank - 1] > 1e-6, "true factors span {rank} directions");
        assert!(
            sv[rank] < sv[0] * 1e-5,
            "singular value {} beyond the rank should vanish, got {}",
            rank,
            sv[rank]
        );
    }

    #[test]
    fn pair_shares_item_factor() {
        let (data, queries) = gen_synthetic_pair(
            SyntheticModel::LowRankFactors { rank: 4 },
            50,
            16,
            20,
            3,
        )
        .unwrap();
        let queries = queries.unwrap();
        assert_eq!(queries.n(), 20);
        assert_eq!(queries.d(), data.d());
        // Data is unchanged by asking for queries as well.
        let alone = gen_synthetic(SyntheticModel::LowRankFactors { rank: 4 }, 50, 16, 3).unwrap();
        assert_eq!(data, alone);
    }

    #[test]
    fn invalid_shapes_rejected() {
        assert!(gen_synthetic(SyntheticModel::Gaussian, 0, 5, 1).is_err());
        assert!(gen_synthetic(SyntheticModel::LowRankFactors { rank: 200 }, 10, 100, 1).is_err());
        assert!(gen_synthetic(SyntheticModel::LowRankFactors { rank: 0 }, 10, 100, 1).is_err());
    }
}
