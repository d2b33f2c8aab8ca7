//! Validated command implementations behind the CLI: benchmark one
//! configuration, sweep one parameter axis, verify the separation bound,
//! generate synthetic data, and convert between matrix formats.
//!
//! Configuration problems surface as [`Error::Usage`] (exit code 2) before
//! any expensive work; runtime failures keep their own variants (exit 1).

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::eval::{
    measure_run, verify_separation, Algorithm, RunConfig, RunReport, SeparationParams,
    SeparationReport,
};
use crate::gen::{gen_synthetic_pair, SyntheticModel};
use crate::index::build_index;
use crate::io::{convert_matrix, load_matrix, save_matrix, DatasetSpec};

/// Environment variable overriding the directory for relative output paths.
pub const OUTPUT_DIR_ENV: &str = "MIPS_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::Usage(format!(
                "unknown report format {other:?}; expected json or csv"
            ))),
        }
    }
}

/// Benchmark invocation: data sources, the algorithm, and its parameters.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub data: DatasetSpec,
    pub queries: DatasetSpec,
    pub algorithm: Algorithm,
    pub samples: Option<u64>,
    pub budget: usize,
    pub k: usize,
    pub seed: u64,
    pub code_bits: Option<usize>,
    pub threads: usize,
    pub timing_repeats: usize,
    pub output: Option<PathBuf>,
    pub format: ReportFormat,
}

impl BenchConfig {
    pub fn new(data: DatasetSpec, queries: DatasetSpec, algorithm: Algorithm) -> Self {
        Self {
            data,
            queries,
            algorithm,
            samples: None,
            budget: 100,
            k: 10,
            seed: 0,
            code_bits: None,
            threads: 1,
            timing_repeats: 5,
            output: None,
            format: ReportFormat::Json,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Usage("k must be at least 1".into()));
        }
        if self.algorithm != Algorithm::BruteForce && self.budget < self.k {
            return Err(Error::Usage(format!(
                "budget B={} must be at least k={}",
                self.budget, self.k
            )));
        }
        if self.algorithm.needs_samples() && self.samples.unwrap_or(0) == 0 {
            return Err(Error::Usage(format!(
                "algorithm {} requires --samples with a positive sample count",
                self.algorithm
            )));
        }
        if self.algorithm.needs_code_bits() && self.code_bits.unwrap_or(0) == 0 {
            return Err(Error::Usage(format!(
                "algorithm {} requires --code-bits with a positive code length",
                self.algorithm
            )));
        }
        if self.threads == 0 {
            return Err(Error::Usage("thread count must be at least 1".into()));
        }
        if self.timing_repeats == 0 {
            return Err(Error::Usage("timing repeats must be at least 1".into()));
        }
        Ok(())
    }

    fn run_config(&self) -> RunConfig {
        let mut cfg = RunConfig::new(self.algorithm);
        cfg.k = self.k;
        cfg.samples = self.samples.unwrap_or(0);
        cfg.budget = self.budget;
        cfg.code_bits = self.code_bits.unwrap_or(0);
        cfg.seed = self.seed;
        cfg.threads = self.threads;
        cfg.timing_repeats = self.timing_repeats;
        cfg
    }
}

/// Joins relative output paths onto `MIPS_OUT_DIR` when it is set.
pub fn resolve_output(path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var(OUTPUT_DIR_ENV) {
        Ok(dir) if !dir.is_empty() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn write_reports(cfg: &BenchConfig, reports: &[RunReport]) -> Result<()> {
    let mut body = String::new();
    match cfg.format {
        ReportFormat::Json => {
            for report in reports {
                body.push_str(&report.to_json());
                body.push('\n');
            }
        }
        ReportFormat::Csv => {
            body.push_str(RunReport::CSV_HEADER);
            body.push('\n');
            for report in reports {
                body.push_str(&report.to_csv_row());
                body.push('\n');
            }
        }
    }
    match &cfg.output {
        Some(path) => {
            let path = resolve_output(path);
            File::create(&path)?.write_all(body.as_bytes())?;
        }
        None => {
            std::io::stdout().write_all(body.as_bytes())?;
        }
    }
    Ok(())
}

/// Config-shaped failures from lower layers become usage errors.
fn as_usage(e: Error) -> Error {
    match e {
        Error::InvalidParameter(msg) => Error::Usage(msg),
        other => other,
    }
}

/// Builds the index, measures the configured pipeline over the query set,
/// and writes the report.
pub fn cmd_bench(cfg: &BenchConfig) -> Result<RunReport> {
    cfg.validate()?;
    let data = Arc::new(load_matrix(&cfg.data)?);
    let queries = load_matrix(&cfg.queries)?;
    if cfg.k > data.n() {
        return Err(Error::Usage(format!(
            "k={} exceeds the {} rows of the data matrix",
            cfg.k,
            data.n()
        )));
    }
    let index = build_index(data);
    let report = measure_run(&cfg.run_config(), &index, &queries).map_err(as_usage)?;
    write_reports(cfg, std::slice::from_ref(&report))?;
    Ok(report)
}

/// One swept parameter with its explicit value list.
#[derive(Debug, Clone)]
pub enum SweepAxis {
    Samples(Vec<u64>),
    Budget(Vec<usize>),
    CodeBits(Vec<usize>),
}

impl SweepAxis {
    fn is_empty(&self) -> bool {
        match self {
            SweepAxis::Samples(v) => v.is_empty(),
            SweepAxis::Budget(v) => v.is_empty(),
            SweepAxis::CodeBits(v) => v.is_empty(),
        }
    }

    fn len(&self) -> usize {
        match self {
            SweepAxis::Samples(v) => v.len(),
            SweepAxis::Budget(v) => v.len(),
            SweepAxis::CodeBits(v) => v.len(),
        }
    }

    fn apply(&self, base: &BenchConfig, i: usize) -> BenchConfig {
        let mut cfg = base.clone();
        match self {
            SweepAxis::Samples(v) => cfg.samples = Some(v[i]),
            SweepAxis::Budget(v) => cfg.budget = v[i],
            SweepAxis::CodeBits(v) => cfg.code_bits = Some(v[i]),
        }
        cfg
    }
}

/// Runs one report per swept value, sharing the index and the seed policy,
/// and writes them as plot-ready rows.
pub fn cmd_sweep(base: &BenchConfig, axis: &SweepAxis) -> Result<Vec<RunReport>> {
    if axis.is_empty() {
        return Err(Error::Usage("sweep value list is empty".into()));
    }
    // Every point must be a valid configuration before any data loads.
    for i in 0..axis.len() {
        axis.apply(base, i).validate()?;
    }
    let data = Arc::new(load_matrix(&base.data)?);
    let queries = load_matrix(&base.queries)?;
    if base.k > data.n() {
        return Err(Error::Usage(format!(
            "k={} exceeds the {} rows of the data matrix",
            base.k,
            data.n()
        )));
    }
    let index = build_index(data);
    let mut reports = Vec::with_capacity(axis.len());
    for i in 0..axis.len() {
        let cfg = axis.apply(base, i);
        reports.push(measure_run(&cfg.run_config(), &index, &queries).map_err(as_usage)?);
    }
    write_reports(base, &reports)?;
    Ok(reports)
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct VerifyOutcome {
    pub report: SeparationReport,
    pub threshold: f64,
    pub passed: bool,
}

/// Runs the separation verifier and judges it against the pass threshold.
pub fn cmd_verify(params: &SeparationParams, threshold: f64) -> Result<VerifyOutcome> {
    let report = verify_separation(params).map_err(as_usage)?;
    Ok(VerifyOutcome {
        threshold,
        passed: report.success_rate >= threshold,
        report,
    })
}

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub model: SyntheticModel,
    pub n: usize,
    pub d: usize,
    pub num_queries: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub queries_out: Option<PathBuf>,
}

/// Generates a synthetic dataset (and optional query set) to disk.
pub fn cmd_gen(cfg: &GenConfig) -> Result<()> {
    if cfg.queries_out.is_some() && cfg.num_queries == 0 {
        return Err(Error::Usage(
            "--queries-out needs --num-queries >= 1".into(),
        ));
    }
    let (data, queries) =
        gen_synthetic_pair(cfg.model, cfg.n, cfg.d, cfg.num_queries, cfg.seed).map_err(as_usage)?;
    save_matrix(&resolve_output(&cfg.out), &data)?;
    if let Some(qpath) = &cfg.queries_out {
        let queries = queries.expect("num_queries >= 1 checked above");
        save_matrix(&resolve_output(qpath), &queries)?;
    }
    Ok(())
}

/// CSV <-> DMAT conversion; formats inferred from the file extensions.
pub fn cmd_convert(input: &Path, output: &Path) -> Result<()> {
    convert_matrix(input, &resolve_output(output))?;
    Ok(())
}
