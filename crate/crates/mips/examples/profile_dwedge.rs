use std::sync::Arc;
use std::time::Instant;

use mips::gen::{gen_synthetic_pair, SyntheticModel};
use mips::index::build_index;
use mips::query::make_query_context;
use mips::rank::{brute_force_topk, extract_top_b, rank_candidates};
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

    let t = Instant::now();
    let ctxs: Vec<_> = (0..nq)
        .map(|i| make_query_context(&index, queries.row(i), samples).unwrap())
        .collect();
    println!("contexts: {:?}", t.elapsed());

    let t = Instant::now();
    let hists: Vec<_> = ctxs
        .iter()
        .map(|ctx| dwedge_sample(&index, ctx, samples))
        .collect();
    println!("dwedge walks: {:?}", t.elapsed());
    let touched: usize = hists.iter().map(|h| h.touched()).sum();
    println!("mean touched: {}", touched / nq);

    let t = Instant::now();
    let cands: Vec<_> = hists.iter().map(|h| extract_top_b(h, 200)).collect();
    println!("extract: {:?}", t.elapsed());

    let t = Instant::now();
    let _r: Vec<_> = (0..nq)
        .map(|i| rank_candidates(index.data(), queries.row(i), &cands[i], 10))
        .collect();
    println!("rank: {:?}", t.elapsed());

    let t = Instant::now();
    let _b: Vec<_> = (0..nq)
        .map(|i| brute_force_topk(index.data(), queries.row(i), 10))
        .collect();
    println!("brute: {:?}", t.elapsed());
}
