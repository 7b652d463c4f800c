//! Batch front end: CSV in, JSON reports (and plot-ready CSV tables) out.
//!
//! Exit codes: 0 success, 2 validation error, 3 numerical failure.

mod commands;
mod csv;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use expectile_core::Error as CoreError;

const SEED_ENV: &str = "EXPECTILE_LAB_SEED";

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numerical(String),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }
    pub fn numerical(msg: impl Into<String>) -> Self {
        CliError::Numerical(msg.into())
    }
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::BracketingFailure(_)
            | CoreError::NonIntegrable(_)
            | CoreError::DegenerateDraw(_)
            | CoreError::ZeroVariance(_)
            | CoreError::DegenerateGenerator(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

#[derive(Parser, Debug, Serialize)]
#[command(
    name = "expectile-lab",
    version,
    about = "Expectile-based risk measures: estimation, bootstrap, parametric fits, Monte Carlo"
)]
pub struct Cli {
    /// Worker threads for replicate-level parallelism (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// RNG seed; falls back to EXPECTILE_LAB_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write a plot-ready CSV table next to the report (supported by
    /// estimate, bootstrap, and the consistency/robustness/comparison
    /// experiments).
    #[arg(long, global = true)]
    table: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum Command {
    /// Expectile, VaR, AVaR, variance estimates, and asymptotic CIs from a CSV column.
    Estimate(EstimateArgs),
    /// Bootstrap distribution, confidence interval, and KS diagnostic.
    Bootstrap(BootstrapArgs),
    /// Parametric fit (log-normal, Pareto MLE, or Hill) with delta-method CI.
    Fit(FitArgs),
    /// Monte Carlo experiments.
    #[command(subcommand)]
    Mc(McCommand),
    /// Coherence-axiom checks on a pair of aligned CSV columns.
    Axioms(AxiomsArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct EstimateArgs {
    /// Input CSV file.
    pub input: PathBuf,
    /// Column index or header name.
    #[arg(long, default_value = "0")]
    pub column: String,
    /// Expectile level(s); repeatable.
    #[arg(long = "alpha", default_values_t = vec![0.5])]
    pub alphas: Vec<f64>,
    /// Autocovariance truncation lag (default floor(n^(1/3))).
    #[arg(long)]
    pub lag: Option<usize>,
    /// Confidence level of the asymptotic intervals.
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    /// Relative solver tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeArg {
    Efron,
    Bayes,
    Circular,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CiKindArg {
    Percentile,
    Basic,
}

#[derive(Args, Debug, Serialize)]
pub struct BootstrapArgs {
    pub input: PathBuf,
    #[arg(long, default_value = "0")]
    pub column: String,
    #[arg(long = "alpha", default_values_t = vec![0.5])]
    pub alphas: Vec<f64>,
    #[arg(long, value_enum, default_value_t = SchemeArg::Efron)]
    pub scheme: SchemeArg,
    /// Block length for the circular scheme (default: largest divisor of n
    /// below n^(1/3)).
    #[arg(long)]
    pub block: Option<usize>,
    /// Number of bootstrap replicates.
    #[arg(long = "B", default_value_t = 1000)]
    pub b_reps: usize,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    #[arg(long, value_enum, default_value_t = CiKindArg::Percentile)]
    pub ci_kind: CiKindArg,
    /// Embed the full replicate vector in the JSON report.
    #[arg(long, default_value_t = false)]
    pub dump_replicates: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyArg {
    Lognormal,
    Pareto,
}

#[derive(Args, Debug, Serialize)]
pub struct FitArgs {
    pub input: PathBuf,
    #[arg(long, default_value = "0")]
    pub column: String,
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Known Pareto location.
    #[arg(long, default_value_t = 1.0)]
    pub cbar: f64,
    /// Use the Hill estimator with this many order statistics instead of
    /// the Pareto MLE.
    #[arg(long = "hill-k")]
    pub hill_k: Option<usize>,
    #[arg(long = "alpha", default_values_t = vec![0.9])]
    pub alphas: Vec<f64>,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    #[arg(long, default_value_t = 0.0)]
    pub fallback_m: f64,
    #[arg(long, default_value_t = 1.0)]
    pub fallback_s2: f64,
    #[arg(long, default_value_t = 2.0)]
    pub fallback_a: f64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GenArg {
    Normal,
    Lognormal,
    Pareto,
    Twopoint,
    Ar1,
}

#[derive(Args, Debug, Serialize, Clone, Copy)]
pub struct GenSpec {
    #[arg(long = "gen", value_enum)]
    pub gen: GenArg,
    /// Location (normal mean / log-scale mean).
    #[arg(long = "g-m", default_value_t = 0.0)]
    pub g_m: f64,
    /// Variance (normal / log-scale / AR(1) innovation).
    #[arg(long = "g-s2", default_value_t = 1.0)]
    pub g_s2: f64,
    /// Pareto tail index.
    #[arg(long = "g-a", default_value_t = 3.0)]
    pub g_a: f64,
    /// Pareto location.
    #[arg(long = "g-cbar", default_value_t = 1.0)]
    pub g_cbar: f64,
    /// Two-point upper-atom probability.
    #[arg(long = "g-p", default_value_t = 0.5)]
    pub g_p: f64,
    #[arg(long = "g-x0", default_value_t = 0.0)]
    pub g_x0: f64,
    #[arg(long = "g-x1", default_value_t = 1.0)]
    pub g_x1: f64,
    /// AR(1) coefficient.
    #[arg(long = "g-phi", default_value_t = 0.5)]
    pub g_phi: f64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleArg {
    Iid,
    Longrun,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverageMethodArg {
    Efron,
    Bayes,
    Circular,
    DeltaLognormal,
    DeltaPareto,
    DeltaHill,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum McCommand {
    /// Plug-in error along one growing sample path.
    Consistency {
        #[command(flatten)]
        gen: GenSpec,
        #[arg(long, default_value_t = 0.7)]
        alpha: f64,
        /// Comma-separated increasing sample sizes.
        #[arg(long = "n-grid", value_delimiter = ',', default_values_t = vec![100, 1000, 10000])]
        n_grid: Vec<usize>,
    },
    /// KS distance of standardized errors to the standard normal.
    Normality {
        #[command(flatten)]
        gen: GenSpec,
        #[arg(long, default_value_t = 0.7)]
        alpha: f64,
        #[arg(long, default_value_t = 2000)]
        n: usize,
        #[arg(long, default_value_t = 2000)]
        reps: usize,
        /// Standardize by this known limit variance.
        #[arg(long = "known-s2")]
        known_s2: Option<f64>,
        /// Standardize by a long-path oracle estimate instead.
        #[arg(long, value_enum)]
        oracle: Option<OracleArg>,
        #[arg(long = "oracle-n", default_value_t = 200_000)]
        oracle_n: usize,
        #[arg(long = "oracle-lag")]
        oracle_lag: Option<usize>,
    },
    /// Empirical coverage of nominal-level confidence intervals.
    Coverage {
        #[command(flatten)]
        gen: GenSpec,
        #[arg(long, default_value_t = 0.7)]
        alpha: f64,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        reps: usize,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
        #[arg(long, value_enum, default_value_t = CoverageMethodArg::Efron)]
        method: CoverageMethodArg,
        #[arg(long)]
        block: Option<usize>,
        #[arg(long = "B", default_value_t = 500)]
        b_reps: usize,
        #[arg(long, default_value_t = 1.0)]
        cbar: f64,
        #[arg(long = "hill-k")]
        hill_k: Option<usize>,
        #[arg(long, default_value_t = 0.0)]
        fallback_m: f64,
        #[arg(long, default_value_t = 1.0)]
        fallback_s2: f64,
        #[arg(long, default_value_t = 2.0)]
        fallback_a: f64,
    },
    /// Estimator-law shift under epsilon-contamination.
    Robustness {
        #[command(flatten)]
        gen: GenSpec,
        #[arg(long, default_value_t = 0.9)]
        alpha: f64,
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 500)]
        reps: usize,
        /// Comma-separated contamination levels in [0, 0.5].
        #[arg(long = "eps", value_delimiter = ',', default_values_t = vec![0.0, 0.01, 0.05, 0.1])]
        epsilons: Vec<f64>,
        /// Outlier law center (default: far above the clean upper decile).
        #[arg(long = "outlier-mu")]
        outlier_mu: Option<f64>,
        #[arg(long = "outlier-s2", default_value_t = 1.0)]
        outlier_s2: f64,
    },
    /// VaR / AVaR / expectile comparison table.
    Comparison {
        #[command(flatten)]
        gen: GenSpec,
        #[arg(long, default_value_t = 0.9)]
        alpha: f64,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 500)]
        reps: usize,
        #[arg(long = "eps", default_value_t = 0.05)]
        contamination: f64,
    },
}

#[derive(Args, Debug, Serialize)]
pub struct AxiomsArgs {
    pub input: PathBuf,
    #[arg(long, default_value = "0")]
    pub col1: String,
    #[arg(long, default_value = "1")]
    pub col2: String,
    #[arg(long, default_value_t = 0.7)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    pub cash: f64,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
}

#[derive(Serialize)]
struct Envelope<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: u64,
    config: &'a Command,
    result: serde_json::Value,
    /// Wall-clock bookkeeping; excluded from the determinism contract.
    meta: EnvelopeMeta,
}

#[derive(Serialize)]
struct EnvelopeMeta {
    runtime_ms: u64,
}

fn resolve_seed(cli: &Cli) -> Result<u64, CliError> {
    if let Some(s) = cli.seed {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .parse::<u64>()
            .map_err(|_| CliError::validation(format!("{SEED_ENV}='{v}' is not a u64"))),
        Err(_) => Ok(0),
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Estimate(_) => "estimate",
        Command::Bootstrap(_) => "bootstrap",
        Command::Fit(_) => "fit",
        Command::Mc(McCommand::Consistency { .. }) => "mc.consistency",
        Command::Mc(McCommand::Normality { .. }) => "mc.normality",
        Command::Mc(McCommand::Coverage { .. }) => "mc.coverage",
        Command::Mc(McCommand::Robustness { .. }) => "mc.robustness",
        Command::Mc(McCommand::Comparison { .. }) => "mc.comparison",
        Command::Axioms(_) => "axioms",
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::validation("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::validation(format!("thread pool: {e}")))?;
    }
    let seed = resolve_seed(cli)?;
    let start = std::time::Instant::now();
    let output = commands::dispatch(&cli.command, seed)?;

    if let Some(path) = &cli.table {
        match output.table {
            Some(t) => std::fs::write(path, t)
                .map_err(|e| CliError::validation(format!("cannot write table: {e}")))?,
            None => {
                return Err(CliError::validation(
                    "--table is not supported by this command",
                ))
            }
        }
    }

    let envelope = Envelope {
        tool: "expectile-lab",
        version: env!("CARGO_PKG_VERSION"),
        command: command_name(&cli.command),
        seed,
        config: &cli.command,
        result: output.result,
        meta: EnvelopeMeta {
            runtime_ms: start.elapsed().as_millis() as u64,
        },
    };
    let json = serde_json::to_string_pretty(&envelope)
        .map_err(|e| CliError::numerical(format!("serialization: {e}")))?;
    match &cli.out {
        Some(path) => std::fs::write(path, json + "\n")
            .map_err(|e| CliError::validation(format!("cannot write report: {e}")))?,
        None => println!("{json}"),
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
