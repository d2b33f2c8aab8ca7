use std::sync::Arc;
use std::time::Instant;

use mips::gen::{gen_synthetic_pair, SyntheticModel};
use mips::index::build_index;
use mips::query::make_query_context;

fn main() {
    let n = 20_000;
    let d = 100;
    let nq = 200;
    let (data, queries) =
        gen_synthetic_pair(SyntheticModel::LowRankFactors { rank: 20 }, n, d, nq, 808).unwrap();
    let queries = queries.unwrap();
    let index = build_index(Arc::new(data));
    let samples = n as u64;

    // Count visits by replicating the walk loop manually.
    let mut total_visits = 0u64;
    let mut total_used = 0f64;
    let t = Instant::now();
    for i in 0..nq {
        let ctx = make_query_context(&index, queries.row(i), samples).unwrap();
        for j in 0..d {
            let s_j = samples as f64 * ctx.col_weight(j);
            if !(s_j > 0.0) { continue; }
            let c_j = index.col_norm(j);
            let mut used = 0.0f64;
            for (&_row, &x) in index.abs_order(j).iter().zip(index.walk_values(j)) {
                let w = (s_j * (x as f64).abs() / c_j).ceil();
                if w < 1.0 { break; }
                total_visits += 1;
                used += w;
                if used >= s_j { break; }
            }
            total_used += used;
        }
    }
    println!("walk-only (no hist): {:?}", t.elapsed());
    println!("visits/query: {}", total_visits / nq as u64);
    println!("used/query: {}", total_used / nq as f64);
}
