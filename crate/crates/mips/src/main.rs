use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mips::commands::{
    cmd_bench, cmd_convert, cmd_gen, cmd_sweep, cmd_verify, BenchConfig, GenConfig, ReportFormat,
    SweepAxis,
};
use mips::error::Error;
use mips::eval::{Algorithm, SeparationParams};
use mips::gen::SyntheticModel;
use mips::io::DatasetSpec;

/// Budgeted top-k maximum inner product search toolkit.
#[derive(Parser)]
#[command(name = "mips", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Benchmark one algorithm configuration over a query set.
    Bench(BenchArgs),
    /// Benchmark a list of values along one parameter axis (S, B, or h).
    Sweep(SweepArgs),
    /// Verify the wedge-sampling separation bound on planted instances.
    Verify(VerifyArgs),
    /// Generate a synthetic dataset (and optionally a query set).
    Gen(GenArgs),
    /// Convert a matrix between CSV and DMAT formats.
    Convert(ConvertArgs),
}

#[derive(Args)]
struct DataArgs {
    /// Data matrix file (.csv or .dmat).
    #[arg(long)]
    data: PathBuf,
    /// Query matrix file (.csv or .dmat), one query per row.
    #[arg(long)]
    queries: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    io: DataArgs,
    /// bruteforce | wedge | diamond | dwedge | ddiamond | greedy | simplelsh.
    #[arg(long)]
    algo: Algorithm,
    /// Sample count S (required for the sampling algorithms).
    #[arg(long)]
    samples: Option<u64>,
    /// Ranking budget B: candidates re-ranked by exact inner product.
    #[arg(long, default_value_t = 100)]
    budget: usize,
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Code length h in bits (required for simplelsh).
    #[arg(long)]
    code_bits: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for the per-query passes; keep 1 for comparable
    /// wall-clock speedups.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Wall times are medians over this many repeated passes.
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    /// Report file; stdout when omitted. Relative paths land in $MIPS_OUT_DIR.
    #[arg(long)]
    output: Option<PathBuf>,
    /// json | csv.
    #[arg(long, default_value = "json")]
    format: ReportFormat,
}

impl BenchArgs {
    fn to_config(&self) -> BenchConfig {
        let mut cfg = BenchConfig::new(
            DatasetSpec::new(&self.io.data),
            DatasetSpec::new(&self.io.queries),
            self.algo,
        );
        cfg.samples = self.samples;
        cfg.budget = self.budget;
        cfg.k = self.k;
        cfg.seed = self.seed;
        cfg.code_bits = self.code_bits;
        cfg.threads = self.threads;
        cfg.timing_repeats = self.repeats;
        cfg.output = self.output.clone();
        cfg.format = self.format;
        cfg
    }
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    bench: BenchArgs,
    /// Comma-separated sample counts to sweep.
    #[arg(long, value_delimiter = ',')]
    sweep_s: Option<Vec<u64>>,
    /// Comma-separated budgets to sweep.
    #[arg(long, value_delimiter = ',')]
    sweep_b: Option<Vec<usize>>,
    /// Comma-separated code lengths to sweep.
    #[arg(long, value_delimiter = ',')]
    sweep_h: Option<Vec<usize>>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    d: usize,
    #[arg(long, default_value_t = 4.0)]
    tau1: f64,
    #[arg(long, default_value_t = 1.0)]
    tau2: f64,
    #[arg(long, default_value_t = 200)]
    trials: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample budget as a multiple of the bound.
    #[arg(long, default_value_t = 1.0)]
    multiplier: f64,
    /// Success rate below which the verification fails.
    #[arg(long, default_value_t = 0.95)]
    threshold: f64,
}

#[derive(Args)]
struct GenArgs {
    /// gaussian | lowrank.
    #[arg(long)]
    model: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    /// Latent rank (lowrank model only).
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long, default_value_t = 0)]
    num_queries: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output data file (.csv or .dmat).
    #[arg(long)]
    out: PathBuf,
    /// Output query file; requires --num-queries.
    #[arg(long)]
    queries_out: Option<PathBuf>,
}

#[derive(Args)]
struct ConvertArgs {
    input: PathBuf,
    output: PathBuf,
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Bench(args) => {
            cmd_bench(&args.to_config())?;
        }
        Command::Sweep(args) => {
            let mut axes: Vec<SweepAxis> = Vec::new();
            if let Some(v) = args.sweep_s.clone() {
                axes.push(SweepAxis::Samples(v));
            }
            if let Some(v) = args.sweep_b.clone() {
                axes.push(SweepAxis::Budget(v));
            }
            if let Some(v) = args.sweep_h.clone() {
                axes.push(SweepAxis::CodeBits(v));
            }
            if axes.len() != 1 {
                return Err(Error::Usage(format!(
                    "exactly one of --sweep-s, --sweep-b, --sweep-h must be given, found {}",
                    axes.len()
                )));
            }
            cmd_sweep(&args.bench.to_config(), &axes[0])?;
        }
        Command::Verify(args) => {
            if args.trials == 1 {
                eprintln!(
                    "warning: a single trial has no statistical power; \
                     use --trials 200 or more"
                );
            }
            let params = SeparationParams {
                n: args.n,
                d: args.d,
                tau1: args.tau1,
                tau2: args.tau2,
                trials: args.trials,
                seed: args.seed,
                budget_multiplier: args.multiplier,
            };
            let outcome = cmd_verify(&params, args.threshold)?;
            println!(
                "required samples per trial: {}",
                outcome.report.required_samples
            );
            println!(
                "separation held in {}/{} trials (rate {:.4})",
                outcome.report.successes, outcome.report.trials, outcome.report.success_rate
            );
            println!(
                "{} (threshold {:.2})",
                if outcome.passed { "PASS" } else { "FAIL" },
                outcome.threshold
            );
            if !outcome.passed {
                return Err(Error::InvalidParameter(format!(
                    "separation success rate {:.4} below threshold {:.2}",
                    outcome.report.success_rate, outcome.threshold
                )));
            }
        }
        Command::Gen(args) => {
            let model = match args.model.to_ascii_lowercase().as_str() {
                "gaussian" => SyntheticModel::Gaussian,
                "lowrank" | "lowrank-factors" => SyntheticModel::LowRankFactors {
                    rank: args.rank.ok_or_else(|| {
                        Error::Usage("--rank is required for the lowrank model".into())
                    })?,
                },
                other => {
                    return Err(Error::Usage(format!(
                        "unknown model {other:?}; expected gaussian or lowrank"
                    )))
                }
            };
            cmd_gen(&GenConfig {
                model,
                n: args.n,
                d: args.d,
                num_queries: args.num_queries,
                seed: args.seed,
                out: args.out,
                queries_out: args.queries_out,
            })?;
        }
        Command::Convert(args) => {
            cmd_convert(&args.input, &args.output)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
