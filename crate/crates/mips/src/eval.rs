//! Metrics, the operation-count cost model, the timing harness, and a
//! Monte-Carlo verifier for wedge sampling's separation bound.

use std::collections::HashSet;
use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::greedy::greedy_candidates;
use crate::index::{build_index, MipsIndex};
use crate::lsh::{lsh_build, LshModel};
use crate::matrix::DataMatrix;
use crate::query::make_query_context;
use crate::rank::{brute_force_topk, extract_top_b, rank_candidates, CandidateSet, TopKResult};
use crate::rng::SamplerRng;
use crate::samplers::{ddiamond_sample, diamond_sample, dwedge_sample, wedge_sample};

/// Fraction of the true top-k found in the retrieved top-k. Slots missing
/// from a short retrieval count as misses.
pub fn precision_at_k(retrieved: &TopKResult, truth: &TopKResult, k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let truth_set: HashSet<u32> = truth.rows().collect();
    let hits = retrieved
        .rows()
        .take(k)
        .filter(|r| truth_set.contains(r))
        .count();
    hits as f64 / k as f64
}

/// Operation-count proxy for a sampling run: 2S/d + B equivalent inner
/// products (two histogram operations per sample, plus the ranking budget).
pub fn cost_model_ops(samples: u64, d: usize, budget: usize) -> f64 {
    2.0 * samples as f64 / d as f64 + budget as f64
}

/// Samples wedge needs to separate products tau vs tau/4 with high
/// probability: 12 z ln(n) / tau.
pub fn wedge_sample_bound(z: f64, n: usize, tau: f64) -> f64 {
    12.0 * z * (n as f64).ln() / tau
}

/// Diamond's counterpart under the same setting: 12 K ||q||_1 z ln(n) / tau^2
/// where K bounds the matrix entries. Since K ||q||_1 >= tau, this is never
/// below the wedge bound.
pub fn diamond_sample_bound(z: f64, n: usize, tau: f64, max_entry: f64, q_norm1: f64) -> f64 {
    12.0 * max_entry * q_norm1 * z * (n as f64).ln() / (tau * tau)
}

/// Parameters for the separation verifier: planted instances where one row
/// has inner product tau1 and every other row sits at tau2.
#[derive(Debug, Clone)]
pub struct SeparationParams {
    pub n: usize,
    pub d: usize,
    pub tau1: f64,
    pub tau2: f64,
    pub trials: u32,
    pub seed: u64,
    /// Scales the sample budget relative to the bound (1.0 = exactly the
    /// bound 3 z ln(n) / (sqrt(tau1) - sqrt(tau2))^2).
    pub budget_multiplier: f64,
}

impl Default for SeparationParams {
    fn default() -> Self {
        Self {
            n: 100,
            d: 10,
            tau1: 4.0,
            tau2: 1.0,
            trials: 200,
            seed: 0,
            budget_multiplier: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SeparationReport {
    pub trials: u32,
    pub successes: u32,
    pub success_rate: f64,
    /// Mean sample budget across trials (z varies slightly per instance).
    pub required_samples: u64,
}

/// Non-negative rows rescaled so row 0 meets tau1 exactly and every other
/// row meets tau2, under the all-ones query.
fn planted_instance(rng: &mut SamplerRng, n: usize, d: usize, tau1: f64, tau2: f64) -> DataMatrix {
    let mut values = Vec::with_capacity(n * d);
    for i in 0..n {
        let raw: Vec<f64> = (0..d).map(|_| rng.uniform().max(1e-9)).collect();
        let sum: f64 = raw.iter().sum();
        let target = if i == 0 { tau1 } else { tau2 };
        let scale = target / sum;
        values.extend(raw.iter().map(|&v| (v * scale) as f32));
    }
    DataMatrix::from_vec(n, d, values).expect("finite planted instance")
}

/// Runs wedge sampling on planted instances at the bound's sample budget and
/// reports how often the planted row's counter strictly beats every low row.
pub fn verify_separation(params: &SeparationParams) -> Result<SeparationReport> {
    if !(params.tau1 > params.tau2 && params.tau2 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "thresholds must satisfy tau1 > tau2 > 0, got tau1={}, tau2={}",
            params.tau1, params.tau2
        )));
    }
    if params.n < 2 || params.d == 0 {
        return Err(Error::InvalidParameter(
            "planted instances need n >= 2 and d >= 1".into(),
        ));
    }
    if params.trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    if !(params.budget_multiplier > 0.0) {
        return Err(Error::InvalidParameter(
            "budget multiplier must be positive".into(),
        ));
    }

    let gap = (params.tau1.sqrt() - params.tau2.sqrt()).powi(2);
    let mut successes = 0u32;
    let mut budget_total = 0.0f64;
    for trial in 0..params.trials {
        let mut rng = SamplerRng::for_query(params.seed, trial as u64);
        let data = planted_instance(&mut rng, params.n, params.d, params.tau1, params.tau2);
        let index = build_index(Arc::new(data));
        // All-ones query: z is the sum of the column norms.
        let z: f64 = index.col_norms().iter().sum();
        let samples =
            (3.0 * z * (params.n as f64).ln() / gap * params.budget_multiplier).ceil() as u64;
        budget_total += samples as f64;

        let q = vec![1.0f32; params.d];
        let ctx = make_query_context(&index, &q, samples)?;
        let hist = wedge_sample(&index, &ctx, samples, &mut rng);
        let planted = hist.get(0).unwrap_or(0.0);
        if (1..params.n as u32).all(|i| planted > hist.get(i).unwrap_or(0.0)) {
            successes += 1;
        }
    }

    Ok(SeparationReport {
        trials: params.trials,
        successes,
        success_rate: successes as f64 / params.trials as f64,
        required_samples: (budget_total / params.trials as f64).round() as u64,
    })
}

/// The benchmarked pipelines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    BruteForce,
    Wedge,
    Diamond,
    DWedge,
    DDiamond,
    Greedy,
    SimpleLsh,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::BruteForce,
        Algorithm::Wedge,
        Algorithm::Diamond,
        Algorithm::DWedge,
        Algorithm::DDiamond,
        Algorithm::Greedy,
        Algorithm::SimpleLsh,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::BruteForce => "bruteforce",
            Algorithm::Wedge => "wedge",
            Algorithm::Diamond => "diamond",
            Algorithm::DWedge => "dwedge",
            Algorithm::DDiamond => "ddiamond",
            Algorithm::Greedy => "greedy",
            Algorithm::SimpleLsh => "simplelsh",
        }
    }

    /// Sampling algorithms require the S parameter.
    pub fn needs_samples(&self) -> bool {
        matches!(
            self,
            Algorithm::Wedge | Algorithm::Diamond | Algorithm::DWedge | Algorithm::DDiamond
        )
    }

    /// SimpleLSH requires the code length h.
    pub fn needs_code_bits(&self) -> bool {
        matches!(self, Algorithm::SimpleLsh)
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bruteforce" | "brute-force" | "brute" => Ok(Algorithm::BruteForce),
            "wedge" => Ok(Algorithm::Wedge),
            "diamond" => Ok(Algorithm::Diamond),
            "dwedge" => Ok(Algorithm::DWedge),
            "ddiamond" => Ok(Algorithm::DDiamond),
            "greedy" => Ok(Algorithm::Greedy),
            "simplelsh" | "lsh" => Ok(Algorithm::SimpleLsh),
            other => Err(Error::Usage(format!(
                "unknown algorithm {other:?}; expected one of bruteforce, wedge, diamond, \
                 dwedge, ddiamond, greedy, simplelsh"
            ))),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One measured run's parameters.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub k: usize,
    pub samples: u64,
    pub budget: usize,
    pub code_bits: usize,
    pub seed: u64,
    /// Worker count for the per-query passes. Timing-sensitive speedup runs
    /// should stay at 1; results are identical for any value.
    pub threads: usize,
    /// Wall times are medians over this many repeated passes.
    pub timing_repeats: usize,
    pub retain_per_query: bool,
}

impl RunConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            k: 10,
            samples: 0,
            budget: 100,
            code_bits: 0,
            seed: 0,
            threads: 1,
            timing_repeats: 5,
            retain_per_query: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PerQueryStat {
    pub query: usize,
    pub precision: f64,
}

/// Everything measured for one run. Serializes to JSON as one object and to
/// CSV as one row with stable field names.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunReport {
    pub algorithm: String,
    pub n: usize,
    pub d: usize,
    pub num_queries: usize,
    pub k: usize,
    pub samples: u64,
    pub budget: usize,
    pub code_bits: Option<usize>,
    pub seed: u64,
    pub threads: usize,
    pub screening_ms: f64,
    pub ranking_ms: f64,
    pub total_ms: f64,
    pub brute_force_ms: f64,
    pub cost_model_ops: f64,
    pub precision_at_k: f64,
    pub speedup: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub per_query: Option<Vec<PerQueryStat>>,
}

impl RunReport {
    pub const CSV_HEADER: &'static str = "algorithm,n,d,num_queries,k,samples,budget,code_bits,\
                                          seed,threads,screening_ms,ranking_ms,total_ms,\
                                          brute_force_ms,cost_model_ops,precision_at_k,speedup";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{:.6},{:.6},{:.6},{:.6},{},{},{:.6}",
            self.algorithm,
            self.n,
            self.d,
            self.num_queries,
            self.k,
            self.samples,
            self.budget,
            self.code_bits.map_or(String::new(), |h| h.to_string()),
            self.seed,
            self.threads,
            self.screening_ms,
            self.ranking_ms,
            self.total_ms,
            self.brute_force_ms,
            self.cost_model_ops,
            self.precision_at_k,
            self.speedup,
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn duration_ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn median_ms(mut durations: Vec<Duration>) -> f64 {
    durations.sort_unstable();
    duration_ms(durations[durations.len() / 2])
}

/// Runs `pass` `repeats` times, keeping the first result and the median wall
/// time across repeats.
fn timed_passes<T>(repeats: usize, mut pass: impl FnMut() -> Vec<T>) -> (Vec<T>, f64) {
    let mut durations = Vec::with_capacity(repeats);
    let mut first: Option<Vec<T>> = None;
    for _ in 0..repeats.max(1) {
        let start = Instant::now();
        let result = pass();
        durations.push(start.elapsed());
        first.get_or_insert(result);
    }
    (first.expect("at least one pass"), median_ms(durations))
}

fn map_queries<T: Send>(
    pool: Option<&rayon::ThreadPool>,
    n: usize,
    f: impl Fn(usize) -> T + Sync + Send,
) -> Vec<T> {
    match pool {
        None => (0..n).map(f).collect(),
        Some(p) => p.install(|| (0..n).into_par_iter().map(f).collect()),
    }
}

fn screen_one(
    cfg: &RunConfig,
    index: &MipsIndex,
    lsh: Option<&LshModel>,
    queries: &DataMatrix,
    ordinal: usize,
) -> CandidateSet {
    let q = queries.row(ordinal);
    match cfg.algorithm {
        Algorithm::BruteForce => unreachable!("brute force skips screening"),
        Algorithm::Greedy => greedy_candidates(index, q, cfg.budget),
        Algorithm::SimpleLsh => lsh.expect("model built").candidates(q, cfg.budget),
        _ => {
            let ctx = make_query_context(index, q, cfg.samples).expect("validated query");
            let mut rng = SamplerRng::for_query(cfg.seed, ordinal as u64);
            let hist = match cfg.algorithm {
                Algorithm::Wedge => wedge_sample(index, &ctx, cfg.samples, &mut rng),
                Algorithm::Diamond => diamond_sample(index, &ctx, cfg.samples, &mut rng),
                Algorithm::DWedge => dwedge_sample(index, &ctx, cfg.samples),
                Algorithm::DDiamond => ddiamond_sample(index, &ctx, cfg.samples, &mut rng),
                _ => unreachable!(),
            };
            extract_top_b(&hist, cfg.budget)
        }
    }
}

/// Measures one configuration over a query set: wall-clock screening/ranking
/// split, mean precision against the exact oracle, and speedup over the
/// brute-force pass measured on the same machine and queries.
pub fn measure_run(
    cfg: &RunConfig,
    index: &MipsIndex,
    queries: &DataMatrix,
) -> Result<RunReport> {
    let data = index.data();
    if queries.d() != data.d() {
        return Err(Error::DimensionMismatch {
            expected: data.d(),
            actual: queries.d(),
        });
    }
    if cfg.k == 0 || cfg.k > data.n() {
        return Err(Error::InvalidParameter(format!(
            "k={} must be in 1..={}",
            cfg.k,
            data.n()
        )));
    }
    if cfg.algorithm != Algorithm::BruteForce && cfg.budget < cfg.k {
        return Err(Error::InvalidParameter(format!(
            "budget B={} must be at least k={}",
            cfg.budget, cfg.k
        )));
    }
    if cfg.algorithm.needs_samples() && cfg.samples == 0 {
        return Err(Error::InvalidParameter(format!(
            "algorithm {} needs a sample count S >= 1",
            cfg.algorithm
        )));
    }
    if cfg.algorithm.needs_code_bits() && cfg.code_bits == 0 {
        return Err(Error::InvalidParameter(format!(
            "algorithm {} needs a code length h >= 1",
            cfg.algorithm
        )));
    }

    let pool = if cfg.threads > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.threads)
                .build()
                .map_err(|e| Error::InvalidParameter(e.to_string()))?,
        )
    } else {
        None
    };
    let nq = queries.n();

    // Ground truth doubles as the brute-force baseline timing.
    let (truth, brute_ms) = timed_passes(cfg.timing_repeats, || {
        map_queries(pool.as_ref(), nq, |i| {
            brute_force_topk(data, queries.row(i), cfg.k)
        })
    });

    let (screening_ms, ranking_ms, retrieved) = match cfg.algorithm {
        Algorithm::BruteForce => {
            let (retrieved, ranking_ms) = timed_passes(cfg.timing_repeats, || {
                map_queries(pool.as_ref(), nq, |i| {
                    brute_force_topk(data, queries.row(i), cfg.k)
                })
            });
            (0.0, ranking_ms, retrieved)
        }
        _ => {
            let lsh = match cfg.algorithm {
                Algorithm::SimpleLsh => Some(lsh_build(data, cfg.code_bits, cfg.seed)?),
                _ => None,
            };
            let (candidates, screening_ms) = timed_passes(cfg.timing_repeats, || {
                map_queries(pool.as_ref(), nq, |i| {
                    screen_one(cfg, index, lsh.as_ref(), queries, i)
                })
            });
            let (retrieved, ranking_ms) = timed_passes(cfg.timing_repeats, || {
                map_queries(pool.as_ref(), nq, |i| {
                    rank_candidates(data, queries.row(i), &candidates[i], cfg.k)
                })
            });
            (screening_ms, ranking_ms, retrieved)
        }
    };

    let per_query: Vec<f64> = (0..nq)
        .map(|i| precision_at_k(&retrieved[i], &truth[i], cfg.k))
        .collect();
    let precision = per_query.iter().sum::<f64>() / nq as f64;

    let total_ms = (screening_ms + ranking_ms).max(1e-6);
    let cost = match cfg.algorithm {
        Algorithm::BruteForce => data.n() as f64,
        Algorithm::Greedy | Algorithm::SimpleLsh => cost_model_ops(0, data.d(), cfg.budget),
        _ => cost_model_ops(cfg.samples, data.d(), cfg.budget),
    };

    Ok(RunReport {
        algorithm: cfg.algorithm.name().to_string(),
        n: data.n(),
        d: data.d(),
        num_queries: nq,
        k: cfg.k,
        samples: cfg.samples,
        budget: cfg.budget,
        code_bits: cfg.algorithm.needs_code_bits().then_some(cfg.code_bits),
        seed: cfg.seed,
        threads: cfg.threads,
        screening_ms,
        ranking_ms,
        total_ms,
        brute_force_ms: brute_ms,
        cost_model_ops: cost,
        precision_at_k: precision,
        speedup: brute_ms / total_ms,
        per_query: cfg.retain_per_query.then(|| {
            per_query
                .iter()
                .enumerate()
                .map(|(query, &precision)| PerQueryStat { query, precision })
                .collect()
        }),
    })
}
