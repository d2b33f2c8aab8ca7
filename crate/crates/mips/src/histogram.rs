//! Signed counting histogram over candidate rows.
//!
//! Small sample budgets use a hash map so memory stays proportional to the
//! rows actually touched; budgets of at least n/2 use a dense array. The two
//! representations are observationally equivalent.

use std::collections::HashMap;

use crate::ScreeningMethod;

#[derive(Debug, Clone)]
enum Repr {
    Sparse(HashMap<u32, f64>),
    Dense {
        values: Vec<f64>,
        touched: Vec<bool>,
        count: usize,
    },
}

/// Per-row signed counters accumulated during screening.
///
/// A row is *touched* once any increment lands on it, even a zero-valued one;
/// only touched rows are candidates downstream.
#[derive(Debug, Clone)]
pub struct Histogram {
    repr: Repr,
    origin: ScreeningMethod,
    degenerate: bool,
}

impl Histogram {
    pub fn sparse(origin: ScreeningMethod) -> Self {
        Self {
            repr: Repr::Sparse(HashMap::new()),
            origin,
            degenerate: false,
        }
    }

    pub fn dense(n: usize, origin: ScreeningMethod) -> Self {
        Self {
            repr: Repr::Dense {
                values: vec![0.0; n],
                touched: vec![false; n],
                count: 0,
            },
            origin,
            degenerate: false,
        }
    }

    /// Picks the representation for a budget of `samples` draws over `n`
    /// rows: sparse below n/2, dense otherwise.
    pub fn for_budget(n: usize, samples: u64, origin: ScreeningMethod) -> Self {
        if samples < n as u64 / 2 {
            Self::sparse(origin)
        } else {
            Self::dense(n, origin)
        }
    }

    /// Marks a histogram produced from a degenerate (zero-mass) query.
    pub fn degenerate(origin: ScreeningMethod) -> Self {
        let mut h = Self::sparse(origin);
        h.degenerate = true;
        h
    }

    #[inline]
    pub fn add(&mut self, row: u32, amount: f64) {
        match &mut self.repr {
            Repr::Sparse(map) => {
                *map.entry(row).or_insert(0.0) += amount;
            }
            Repr::Dense {
                values,
                touched,
                count,
            } => {
                values[row as usize] += amount;
                if !touched[row as usize] {
                    touched[row as usize] = true;
                    *count += 1;
                }
            }
        }
    }

    /// Counter for a row, or `None` if the row was never touched.
    pub fn get(&self, row: u32) -> Option<f64> {
        match &self.repr {
            Repr::Sparse(map) => map.get(&row).copied(),
            Repr::Dense {
                values, touched, ..
            } => touched[row as usize].then(|| values[row as usize]),
        }
    }

    /// Number of distinct touched rows.
    pub fn touched(&self) -> usize {
        match &self.repr {
            Repr::Sparse(map) => map.len(),
            Repr::Dense { count, .. } => *count,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.touched() == 0
    }

    pub fn iter(&self) -> Box<dyn Iterator<Item = (u32, f64)> + '_> {
        match &self.repr {
            Repr::Sparse(map) => Box::new(map.iter().map(|(&r, &v)| (r, v))),
            Repr::Dense {
                values, touched, ..
            } => Box::new(
                values
                    .iter()
                    .zip(touched)
                    .enumerate()
                    .filter(|(_, (_, &t))| t)
                    .map(|(i, (&v, _))| (i as u32, v)),
            ),
        }
    }

    /// Visits every touched row without the boxed-iterator indirection;
    /// this is the hot path under candidate extraction.
    #[inline]
    pub fn for_each(&self, mut f: impl FnMut(u32, f64)) {
        match &self.repr {
            Repr::Sparse(map) => {
                for (&r, &v) in map {
                    f(r, v);
                }
            }
            Repr::Dense {
                values, touched, ..
            } => {
                for (i, (&v, &t)) in values.iter().zip(touched).enumerate() {
                    if t {
                        f(i as u32, v);
                    }
                }
            }
        }
    }

    /// Counters sorted by row, for deterministic comparison.
    pub fn to_sorted_vec(&self) -> Vec<(u32, f64)> {
        let mut v: Vec<(u32, f64)> = self.iter().collect();
        v.sort_unstable_by_key(|&(r, _)| r);
        v
    }

    /// Sum of |counter| over touched rows.
    pub fn total_magnitude(&self) -> f64 {
        self.iter().map(|(_, v)| v.abs()).sum()
    }

    pub fn origin(&self) -> ScreeningMethod {
        self.origin
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }
}
