use std::sync::Arc;
use std::time::Instant;

use mips::gen::{gen_synthetic_pair, SyntheticModel};
use mips::index::build_index;
use mips::query::make_query_context;
use mips::samplers::dwedge_sample;

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

    for round in 0..3 {
        let t = Instant::now();
        let mut sink = 0usize;
        for ctx in &ctxs {
            sink += dwedge_sample(&index, ctx, samples).touched();
        }
        println!("round {round} dwedge_sample: {:?} (sink {sink})", t.elapsed());
    }
}
