mod commands;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use curvereg::KernelSpec;

use crate::error::{CliError, CliResult};

/// Seed used when `--seed` is absent.
pub const DEFAULT_SEED: u64 = 42;

/// Register one time series against another by maximizing a kernel measure
/// of alignment over monotone linear-spline warps.
#[derive(Debug, Parser)]
#[command(name = "curvereg", version, about)]
pub struct Cli {
    /// Print machine-readable JSON on stdout (and JSON errors on stderr).
    #[arg(long, global = true)]
    pub json: bool,
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Repeated observation times: average them or reject the input.
    #[arg(long, global = true, value_enum, default_value_t = Dedupe::Average)]
    pub dedupe: Dedupe,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Dedupe {
    Average,
    Error,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the warp aligning data set 2 to data set 1.
    Register(RegisterArgs),
    /// Evaluate the alignment measure at a given warp.
    Measure(MeasureArgs),
    /// Detect and match peaks and valleys.
    Landmarks(LandmarksArgs),
    /// Run a Monte Carlo study.
    Simulate(SimulateArgs),
    /// Average squared distance between interpolated curves, before and after alignment.
    Distance(DistanceArgs),
}

#[derive(Debug, Clone, Args, serde::Serialize)]
pub struct PairArgs {
    /// Reference series (CSV `time,value`).
    #[arg(long)]
    pub data1: PathBuf,
    /// Series whose time scale is transformed.
    #[arg(long)]
    pub data2: PathBuf,
}

fn parse_kernel(s: &str) -> Result<KernelSpec, String> {
    s.parse().map_err(|e: curvereg::Error| e.to_string())
}

#[derive(Debug, Clone, Args, serde::Serialize)]
pub struct KernelArgs {
    /// Time kernel K1.
    #[arg(long, value_parser = parse_kernel, default_value = "gaussian")]
    pub kernel: KernelSpec,
    /// Value kernel K2.
    #[arg(long, value_parser = parse_kernel, default_value = "gaussian")]
    pub kernel2: KernelSpec,
    /// Time bandwidth (default: 5% of data set 1's time range).
    #[arg(long)]
    pub h1: Option<f64>,
    /// Value bandwidth (default: 10% of the pooled value range).
    #[arg(long)]
    pub h2: Option<f64>,
    /// Ignore gaussian pairs farther apart than this many h1.
    #[arg(long)]
    pub prune: Option<f64>,
    /// Blocks of the outer sum evaluated in parallel. Results depend on this
    /// count, not on the thread count.
    #[arg(long, default_value_t = 1)]
    pub partitions: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InitKind {
    Landmarks,
    Identity,
}

#[derive(Debug, Clone, Args, serde::Serialize)]
pub struct SearchArgs {
    /// Starting warp.
    #[arg(long, value_enum, default_value_t = InitKind::Landmarks)]
    pub init: InitKind,
    /// Start from a warp file instead (overrides --init).
    #[arg(long)]
    pub init_warp: Option<PathBuf>,
    /// Minimum landmark prominence as a fraction of the value range.
    #[arg(long, default_value_t = curvereg::landmarks::DEFAULT_PROMINENCE_FRAC)]
    pub prominence: f64,
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
    /// Relative change of L_n below which the ascent stops.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Smallest segment slope allowed.
    #[arg(long, default_value_t = 0.5)]
    pub slope_min: f64,
    /// Largest segment slope allowed.
    #[arg(long, default_value_t = 2.0)]
    pub slope_max: f64,
    /// Allow warps that map data set 2 beyond data set 1's time range.
    #[arg(long)]
    pub no_contain: bool,
    /// Drop slope bounds and containment: only strict monotonicity remains.
    #[arg(long)]
    pub free: bool,
}

#[derive(Debug, Clone, Args, serde::Serialize)]
pub struct RegisterArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Number of equidistant knots.
    #[arg(long, default_value_t = 21)]
    pub knots: usize,
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Result JSON (a manifest is written alongside).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write data set 2 on the aligned time scale as CSV.
    #[arg(long)]
    pub aligned: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, serde::Serialize)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Warp JSON or a `register` result (default: identity).
    #[arg(long)]
    pub warp: Option<PathBuf>,
    #[command(flatten)]
    pub kernel: KernelArgs,
}

#[derive(Debug, Clone, Args, serde::Serialize)]
pub struct LandmarksArgs {
    #[arg(long)]
    pub data1: PathBuf,
    /// When given, landmarks of both series are matched.
    #[arg(long)]
    pub data2: Option<PathBuf>,
    #[arg(long, default_value_t = curvereg::landmarks::DEFAULT_PROMINENCE_FRAC)]
    pub prominence: f64,
    /// Directory for `landmarks1.csv`, `landmarks2.csv` and `matches.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TrueWarpArg {
    Spline,
    Periodic,
}

#[derive(Debug, Clone, Args, serde::Serialize)]
pub struct SimulateArgs {
    /// Design 1-4: fixed (1, 3) or uniform (2, 4) times, spline (1, 2) or
    /// periodic (3, 4) true warp.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    pub scenario: u8,
    #[arg(long, default_value_t = 100)]
    pub runs: usize,
    /// Base curve CSV (default: `vostok_co2.csv` in $CURVEREG_DATA_DIR, else
    /// the bundled synthetic curve).
    #[arg(long)]
    pub base: Option<PathBuf>,
    #[arg(long)]
    pub n1: Option<usize>,
    #[arg(long)]
    pub n2: Option<usize>,
    /// Noise SD as a fraction of the base values' SD.
    #[arg(long, default_value_t = curvereg::simulate::NOISE_FRACTION)]
    pub noise_frac: f64,
    /// Override the scenario's true warp.
    #[arg(long, value_enum)]
    pub true_warp: Option<TrueWarpArg>,
    /// Knots of the estimator (default: 21 in scenario 1, else 20).
    #[arg(long)]
    pub knots: Option<usize>,
    /// Fixed bandwidths; by default each pair gets the default rule.
    #[arg(long, requires = "h2")]
    pub h1: Option<f64>,
    #[arg(long, requires = "h1")]
    pub h2: Option<f64>,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, serde::Serialize)]
pub struct DistanceArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Warp JSON or a `register` result; adds the post-alignment distance.
    #[arg(long)]
    pub warp: Option<PathBuf>,
    #[arg(long, default_value_t = curvereg::metrics::DISTANCE_GRID_POINTS)]
    pub grid: usize,
}

fn run(cli: &Cli, argv: &[String]) -> CliResult<commands::Report> {
    let pool = match cli.threads {
        Some(0) => return Err(CliError::Usage("--threads must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    }
    .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))?;
    pool.install(|| commands::dispatch(cli, argv))
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let wants_json = argv.iter().any(|a| a == "--json");
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() || !wants_json => e.exit(),
        Err(e) => {
            let rendered = e.render().to_string();
            let first = rendered.lines().next().unwrap_or_default();
            let err = CliError::Usage(first.trim_start_matches("error: ").to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match run(&cli, &argv) {
        Ok(report) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report.json).expect("report serializes"));
            } else {
                print!("{}", report.text);
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            if cli.json {
                eprintln!("{}", err.to_json());
            } else {
                eprintln!("error[{}]: {err}", err.code());
            }
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
