//! Budgeted top-k maximum inner product search (MIPS).
//!
//! Given an item matrix and a query, find the rows with the largest inner
//! products under a computational budget: S sampling operations for the
//! screening phase and B exact inner products for the ranking phase.
//!
//! The pipeline is index -> screen -> rank:
//! 1. [`build_index`] precomputes per-column norms, sorted permutations, and
//!    alias tables (query-independent, O(dn log n)).
//! 2. A screener builds a counting histogram over rows: randomized
//!    [`wedge_sample`]/[`diamond_sample`], deterministic [`dwedge_sample`],
//!    or their combination [`ddiamond_sample`]; [`greedy_candidates`] and
//!    [`lsh_candidates`] are cursor- and code-based alternatives.
//! 3. [`extract_top_b`] keeps the B strongest candidates and
//!    [`rank_candidates`] re-ranks them by exact inner product.
//!
//! [`brute_force_topk`] is the exact oracle, [`measure_run`] the evaluation
//! harness, and the `mips` binary exposes everything on the command line.

pub mod alias;
pub mod commands;
pub mod error;
pub mod eval;
pub mod gen;
pub mod greedy;
pub mod histogram;
pub mod index;
pub mod io;
pub mod lsh;
pub mod matrix;
pub mod query;
pub mod rank;
pub mod rng;
pub mod samplers;

pub use alias::AliasTable;
pub use error::{Error, Result};
pub use eval::{
    cost_model_ops, measure_run, precision_at_k, verify_separation, Algorithm, RunConfig,
    RunReport, SeparationParams, SeparationReport,
};
pub use gen::{gen_synthetic, gen_synthetic_pair, SyntheticModel};
pub use greedy::{greedy_candidates, greedy_scan};
pub use histogram::Histogram;
pub use index::{build_index, MipsIndex};
pub use io::{load_matrix, DatasetSpec, MatrixFormat};
pub use lsh::{lsh_build, lsh_candidates, LshModel};
pub use matrix::DataMatrix;
pub use query::{make_query_context, QueryContext};
pub use rank::{brute_force_topk, extract_top_b, rank_candidates, CandidateSet, TopKResult};
pub use rng::SamplerRng;
pub use samplers::{basic_estimate, ddiamond_sample, diamond_sample, dwedge_sample, wedge_sample};

/// Which screening algorithm produced a histogram or candidate set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScreeningMethod {
    Wedge,
    Diamond,
    DWedge,
    DDiamond,
    Greedy,
    SimpleLsh,
}

impl ScreeningMethod {
    pub fn name(&self) -> &'static str {
        match self {
            ScreeningMethod::Wedge => "wedge",
            ScreeningMethod::Diamond => "diamond",
            ScreeningMethod::DWedge => "dwedge",
            ScreeningMethod::DDiamond => "ddiamond",
            ScreeningMethod::Greedy => "greedy",
            ScreeningMethod::SimpleLsh => "simplelsh",
        }
    }
}
