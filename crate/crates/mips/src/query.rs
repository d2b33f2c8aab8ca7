//! Per-query derived statistics: absolute query weights, total sampling mass
//! z, per-column weights and sample budgets, and the query-side alias tables.

use crate::alias::AliasTable;
use crate::error::{Error, Result};
use crate::index::MipsIndex;

/// Everything the samplers derive from a query in O(d) time.
#[derive(Debug, Clone)]
pub struct QueryContext {
    q: Vec<f32>,
    abs_q: Vec<f64>,
    q_norm1: f64,
    /// z = sum_j c_j |q_j|, the total sampling mass.
    z: f64,
    /// w_j = c_j |q_j| / z; all zeros when degenerate.
    col_weight: Vec<f64>,
    /// s_j = S w_j for the budget this context was built with.
    sample_budgets: Vec<f64>,
    samples: u64,
    /// Column sampler proportional to c_j |q_j| (wedge's first stage).
    weight_alias: Option<AliasTable>,
    /// Column sampler proportional to |q_j| (basic sampling / diamond's
    /// second stage).
    query_alias: Option<AliasTable>,
    degenerate: bool,
}

/// Derives the query context. A query with no sampling mass (z = 0) yields a
/// context flagged degenerate rather than an error; samplers then produce
/// empty histograms.
pub fn make_query_context(index: &MipsIndex, q: &[f32], samples: u64) -> Result<QueryContext> {
    if q.len() != index.d() {
        return Err(Error::DimensionMismatch {
            expected: index.d(),
            actual: q.len(),
        });
    }
    if let Some(pos) = q.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteQuery { pos });
    }

    let abs_q: Vec<f64> = q.iter().map(|&v| (v as f64).abs()).collect();
    let q_norm1: f64 = abs_q.iter().sum();
    let mass: Vec<f64> = abs_q
        .iter()
        .zip(index.col_norms())
        .map(|(&a, &c)| a * c)
        .collect();
    let z: f64 = mass.iter().sum();
    let degenerate = !(z > 0.0);

    let col_weight: Vec<f64> = if degenerate {
        vec![0.0; q.len()]
    } else {
        mass.iter().map(|&m| m / z).collect()
    };
    let sample_budgets: Vec<f64> = col_weight.iter().map(|&w| samples as f64 * w).collect();
    let weight_alias = if degenerate { None } else { AliasTable::new(&mass) };
    let query_alias = if q_norm1 > 0.0 {
        AliasTable::new(&abs_q)
    } else {
        None
    };

    Ok(QueryContext {
        q: q.to_vec(),
        abs_q,
        q_norm1,
        z,
        col_weight,
        sample_budgets,
        samples,
        weight_alias,
        query_alias,
        degenerate,
    })
}

impl QueryContext {
    pub fn query(&self) -> &[f32] {
        &self.q
    }

    #[inline]
    pub fn query_value(&self, j: usize) -> f64 {
        self.q[j] as f64
    }

    pub fn abs_query(&self) -> &[f64] {
        &self.abs_q
    }

    pub fn q_norm1(&self) -> f64 {
        self.q_norm1
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn col_weights(&self) -> &[f64] {
        &self.col_weight
    }

    #[inline]
    pub fn col_weight(&self, j: usize) -> f64 {
        self.col_weight[j]
    }

    pub fn sample_budgets(&self) -> &[f64] {
        &self.sample_budgets
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn weight_alias(&self) -> Option<&AliasTable> {
        self.weight_alias.as_ref()
    }

    pub fn query_alias(&self) -> Option<&AliasTable> {
        self.query_alias.as_ref()
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }
}
