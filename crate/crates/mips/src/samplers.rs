//! Screening-phase samplers. Each produces a signed counting histogram over
//! rows whose large counters identify likely top inner products.
//!
//! All samplers run on absolute values and credit counters with the product
//! of entry and query signs, so they handle general inputs while reducing to
//! plain counting on non-negative data. `sgn(0)` is `+1`.
//!
//! - `basic_estimate`: single-stage column sampling; unbiased inner product
//!   estimate for one row.
//! - `wedge_sample`: column by weight c_j|q_j|/z, then row by |x_ij|/c_j;
//!   row marginal proportional to the inner product.
//! - `diamond_sample`: wedge draw plus an independent basic column draw;
//!   counter expectation proportional to the squared inner product.
//! - `dwedge_sample`: deterministic variant that walks each column's largest
//!   entries with ceiling-weighted credits.
//! - `ddiamond_sample`: the deterministic walk combined with randomized basic
//!   column draws.

use crate::error::{Error, Result};
use crate::histogram::Histogram;
use crate::index::MipsIndex;
use crate::matrix::DataMatrix;
use crate::query::QueryContext;
use crate::rng::SamplerRng;
use crate::ScreeningMethod;

#[inline]
fn sgn(v: f64) -> f64 {
    if v < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Unbiased estimate of `x_row . q` from `draws` basic-sampling draws:
/// columns j ~ |q_j|/||q||_1, each draw contributing sgn(q_j) x_{row,j},
/// scaled back by ||q||_1.
pub fn basic_estimate(
    data: &DataMatrix,
    ctx: &QueryContext,
    row: usize,
    draws: u64,
    rng: &mut SamplerRng,
) -> Result<f64> {
    if draws == 0 {
        return Err(Error::InvalidParameter(
            "basic_estimate needs at least one draw".into(),
        ));
    }
    let alias = ctx.query_alias().ok_or(Error::DegenerateQuery)?;
    let mut sum = 0.0;
    for _ in 0..draws {
        let j = alias.sample(rng);
        sum += sgn(ctx.query_value(j)) * data.get(row, j) as f64;
    }
    Ok(ctx.q_norm1() * sum / draws as f64)
}

/// Wedge screening: `samples` independent two-stage draws, each adding
/// sgn(x_ij) sgn(q_j) to the drawn row's counter. The total increment
/// magnitude is exactly `samples`.
pub fn wedge_sample(
    index: &MipsIndex,
    ctx: &QueryContext,
    samples: u64,
    rng: &mut SamplerRng,
) -> Histogram {
    if ctx.is_degenerate() {
        return Histogram::degenerate(ScreeningMethod::Wedge);
    }
    let mut hist = Histogram::for_budget(index.n(), samples, ScreeningMethod::Wedge);
    let weight_alias = ctx.weight_alias().expect("non-degenerate context");
    for _ in 0..samples {
        let j = weight_alias.sample(rng);
        let row = index.col_alias(j).expect("sampleable column").sample(rng);
        let x = index.col_values(j)[row] as f64;
        hist.add(row as u32, sgn(x) * sgn(ctx.query_value(j)));
    }
    hist
}

/// Diamond screening: each draw is a wedge draw (i, j) followed by a basic
/// column draw j', adding sgn(q_j) sgn(x_ij) sgn(q_j') x_ij'. The scaled
/// counter mean `counter[i] z ||q||_1 / S` estimates (x_i . q)^2.
pub fn diamond_sample(
    index: &MipsIndex,
    ctx: &QueryContext,
    samples: u64,
    rng: &mut SamplerRng,
) -> Histogram {
    if ctx.is_degenerate() {
        return Histogram::degenerate(ScreeningMethod::Diamond);
    }
    let mut hist = Histogram::for_budget(index.n(), samples, ScreeningMethod::Diamond);
    let data = index.data();
    let weight_alias = ctx.weight_alias().expect("non-degenerate context");
    let query_alias = ctx.query_alias().expect("non-degenerate context");
    for _ in 0..samples {
        let j = weight_alias.sample(rng);
        let row = index.col_alias(j).expect("sampleable column").sample(rng);
        let x = index.col_values(j)[row] as f64;
        let jp = query_alias.sample(rng);
        let xp = data.get(row, jp) as f64;
        hist.add(
            row as u32,
            sgn(ctx.query_value(j)) * sgn(x) * sgn(ctx.query_value(jp)) * xp,
        );
    }
    hist
}

/// Walks column `j`'s rows in descending |x_ij| order, calling `visit` with
/// each row, its signed entry, and its ceiling weight ceil(s_j |x_ij| / c_j).
/// Stops once the accumulated weight reaches `s_j`, a weight would be zero
/// (every later entry is no larger), or the column is exhausted.
fn walk_column(index: &MipsIndex, j: usize, s_j: f64, mut visit: impl FnMut(u32, f64, f64)) {
    if !(s_j > 0.0) {
        return;
    }
    let c_j = index.col_norm(j);
    let mut used = 0.0f64;
    for (&row, &x) in index.abs_order(j).iter().zip(index.walk_values(j)) {
        let x = x as f64;
        let w = (s_j * x.abs() / c_j).ceil();
        if w < 1.0 {
            break;
        }
        visit(row, x, w);
        used += w;
        if used >= s_j {
            break;
        }
    }
}

/// Deterministic wedge: each column j gets a real-valued budget
/// s_j = S c_j |q_j| / z and greedily credits its largest-magnitude entries
/// with sgn(x_ij) sgn(q_j) ceil(s_j |x_ij| / c_j). A pure function of
/// (index, query, S).
pub fn dwedge_sample(index: &MipsIndex, ctx: &QueryContext, samples: u64) -> Histogram {
    if ctx.is_degenerate() {
        return Histogram::degenerate(ScreeningMethod::DWedge);
    }
    let mut hist = Histogram::for_budget(index.n(), samples, ScreeningMethod::DWedge);
    for j in 0..index.d() {
        let s_j = samples as f64 * ctx.col_weight(j);
        let q_sign = sgn(ctx.query_value(j));
        walk_column(index, j, s_j, |row, x, w| {
            hist.add(row, sgn(x) * q_sign * w);
        });
    }
    hist
}

/// dWedge's traversal with diamond's second stage: a visit of weight w issues
/// w basic column draws j', each adding sgn(q_j) sgn(x_ij) sgn(q_j') x_ij'.
/// Randomness comes only from the basic draws.
pub fn ddiamond_sample(
    index: &MipsIndex,
    ctx: &QueryContext,
    samples: u64,
    rng: &mut SamplerRng,
) -> Histogram {
    if ctx.is_degenerate() {
        return Histogram::degenerate(ScreeningMethod::DDiamond);
    }
    let mut hist = Histogram::for_budget(index.n(), samples, ScreeningMethod::DDiamond);
    let data = index.data();
    let query_alias = ctx.query_alias().expect("non-degenerate context");
    for j in 0..index.d() {
        let s_j = samples as f64 * ctx.col_weight(j);
        let q_sign = sgn(ctx.query_value(j));
        walk_column(index, j, s_j, |row, x, w| {
            let lead = sgn(x) * q_sign;
            for _ in 0..w as u64 {
                let jp = query_alias.sample(rng);
                let xp = data.get(row as usize, jp) as f64;
                hist.add(row, lead * sgn(ctx.query_value(jp)) * xp);
            }
        });
    }
    hist
}
