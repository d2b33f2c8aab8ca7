use crate::error::{Error, Result};

/// Dense row-major matrix of item vectors.
///
/// Entries are stored as `f32` (the on-disk precision); every computation on
/// them accumulates in `f64`. Rows are points, columns are dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    n: usize,
    d: usize,
    values: Vec<f32>,
}

impl DataMatrix {
    /// Builds a matrix from a row-major value buffer, rejecting empty shapes
    /// and non-finite entries (reported with their row/column location).
    pub fn from_vec(n: usize, d: usize, values: Vec<f32>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::EmptyMatrix);
        }
        if values.len() != n * d {
            return Err(Error::DimensionMismatch {
                expected: n * d,
                actual: values.len(),
            });
        }
        for (pos, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    row: pos / d,
                    col: pos % d,
                });
            }
        }
        Ok(Self { n, d, values })
    }

    pub fn from_rows(rows: Vec<Vec<f32>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        let d = rows[0].len();
        let n = rows.len();
        let mut values = Vec::with_capacity(n * d);
        for row in &rows {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::from_vec(n, d, values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f32 {
        self.values[row * self.d + col]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f32] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    /// Column `j` in row order.
    pub fn column(&self, j: usize) -> impl Iterator<Item = f32> + '_ {
        self.values.iter().skip(j).step_by(self.d).copied()
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    /// Exact inner product of row `i` with `q`, accumulated in f64.
    #[inline]
    pub fn dot(&self, i: usize, q: &[f32]) -> f64 {
        debug_assert_eq!(q.len(), self.d);
        self.row(i)
            .iter()
            .zip(q)
            .map(|(&x, &y)| x as f64 * y as f64)
            .sum()
    }

    /// 2-norm of row `i`.
    pub fn row_norm2(&self, i: usize) -> f64 {
        self.row(i)
            .iter()
            .map(|&x| (x as f64) * (x as f64))
            .sum::<f64>()
            .sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_slice_matches_rows() {
        let m = DataMatrix::from_vec(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let col0: Vec<f32> = m.column(0).collect();
        let col1: Vec<f32> = m.column(1).collect();
        assert_eq!(col0, vec![1.0, 3.0]);
        assert_eq!(col1, vec![2.0, 4.0]);
        assert_eq!(m.row(1), &[3.0, 4.0]);
    }

    #[test]
    fn rejects_empty_shapes() {
        assert!(matches!(
            DataMatrix::from_vec(0, 3, vec![]),
            Err(Error::EmptyMatrix)
        ));
        assert!(matches!(
            DataMatrix::from_rows(vec![]),
            Err(Error::EmptyMatrix)
        ));
    }

    #[test]
    fn rejects_non_finite_with_location() {
        let err = DataMatrix::from_vec(2, 2, vec![1.0, 2.0, f32::NAN, 4.0]).unwrap_err();
        match err {
            Error::NonFinite { row, col } => {
                assert_eq!((row, col), (1, 0));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_ragged_rows() {
        let err = DataMatrix::from_rows(vec![vec![1.0, 2.0], vec![3.0]]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn dot_is_exact_on_integers() {
        let m = DataMatrix::from_vec(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(m.dot(0, &[1.0, 1.0]), 3.0);
        assert_eq!(m.dot(1, &[1.0, 1.0]), 7.0);
    }
}
