use std::sync::Arc;
use std::time::Instant;

use mips::gen::{gen_synthetic_pair, SyntheticModel};
use mips::histogram::Histogram;
use mips::index::build_index;
use mips::query::make_query_context;
use mips::ScreeningMethod;

fn main() {
    let n = 20_000;
    let d = 100;
    let nq = 200;
    let (data, queries) =
        gen_synthetic_pair(SyntheticModel::LowRankFactors { rank: 20 }, n, d, nq, 808).unwrap();
    let queries = queries.unwrap();
    let index = build_index(Arc::new(data));
    let samples = n as u64;
    let ctxs: Vec<_> = (0..nq)
        .map(|i| make_query_context(&index, queries.row(i), samples).unwrap())
        .collect();

    // walk with manual inline dense accumulation
    let t = Instant::now();
    let mut sink = 0.0;
    for ctx in &ctxs {
        let mut values = vec![0.0f64; n];
        let mut touched = vec![false; n];
        let mut count = 0usize;
        for j in 0..d {
            let s_j = samples as f64 * ctx.col_weight(j);
            if !(s_j > 0.0) { continue; }
            let c_j = index.col_norm(j);
            let q_sign = if ctx.query_value(j) < 0.0 { -1.0 } else { 1.0 };
            let mut used = 0.0f64;
            for (&row, &x) in index.abs_order(j).iter().zip(index.walk_values(j)) {
                let x = x as f64;
                let w = (s_j * x.abs() / c_j).ceil();
                if w < 1.0 { break; }
                let ru = row as usize;
                let sign = if x < 0.0 { -1.0 } else { 1.0 };
                values[ru] += sign * q_sign * w;
                if !touched[ru] { touched[ru] = true; count += 1; }
                used += w;
                if used >= s_j { break; }
            }
        }
        sink += values[0] + count as f64;
    }
    println!("manual walk+acc: {:?} (sink {sink})", t.elapsed());

    // walk into Histogram
    let t = Instant::now();
    let mut sink = 0.0;
    for ctx in &ctxs {
        let mut hist = Histogram::dense(n, ScreeningMethod::DWedge);
        for j in 0..d {
            let s_j = samples as f64 * ctx.col_weight(j);
            if !(s_j > 0.0) { continue; }
            let c_j = index.col_norm(j);
            let q_sign = if ctx.query_value(j) < 0.0 { -1.0 } else { 1.0 };
            let mut used = 0.0f64;
            for (&row, &x) in index.abs_order(j).iter().zip(index.walk_values(j)) {
                let x = x as f64;
                let w = (s_j * x.abs() / c_j).ceil();
                if w < 1.0 { break; }
                let sign = if x < 0.0 { -1.0 } else { 1.0 };
                hist.add(row, sign * q_sign * w);
                used += w;
                if used >= s_j { break; }
            }
        }
        sink += hist.touched() as f64;
    }
    println!("hist walk+acc: {:?} (sink {sink})", t.elapsed());
}
