//! `slicer` command-line entry point.
//!
//! Every subcommand prints its result on stdout. With `--out DIR` the result
//! is also written to `DIR` together with `manifest.json`, which records the
//! arguments, seed, code version, wall time and input file hashes.
//!
//! Exit codes: 0 on success, 1 on a domain error (reported as JSON on
//! stderr) or an incomplete slicing from `verify`, 2 on a usage error.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use slicer::cube::{ConstructionKind, CrossingMode};
use slicer::lab::CellKind;
use slicer::Arithmetic;

#[derive(Debug, Parser)]
#[command(
    name = "slicer",
    version,
    about = "Hypercube edge slicing: verification, sampling and anti-concentration tools"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Seed for all random streams.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "SLICER_THREADS", value_parser = clap::value_parser!(u32).range(1..))]
    pub threads: Option<u32>,
    /// Directory receiving the result file and `manifest.json`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a known slicing configuration as JSON.
    Construct(ConstructArgs),
    /// Split a vector into dyadic scale buckets.
    Decompose(DecomposeArgs),
    /// Exhaustively check which edges a configuration slices.
    Verify(VerifyArgs),
    /// Draw bias vectors or evasive edges as JSON lines.
    Sample(SampleArgs),
    /// Levy concentration of a biased linear form against the Sperner bound.
    Qfunc(QfuncArgs),
    /// Monte Carlo estimators.
    Estimate(EstimateArgs),
    /// Simulated annealing search for small slicing configurations.
    Search(SearchArgs),
    /// Run all estimators over a grid of dimensions and plane counts.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Axis,
    #[value(alias = "middle_layers")]
    MiddleLayers,
}

impl From<KindArg> for ConstructionKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Axis => ConstructionKind::Axis,
            KindArg::MiddleLayers => ConstructionKind::MiddleLayers,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Strict,
    Relaxed,
}

impl From<ModeArg> for CrossingMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Strict => CrossingMode::Strict,
            ModeArg::Relaxed => CrossingMode::Relaxed,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ArithArg {
    Exact,
    Float,
}

impl From<ArithArg> for Arithmetic {
    fn from(a: ArithArg) -> Self {
        match a {
            ArithArg::Exact => Arithmetic::Exact,
            ArithArg::Float => Arithmetic::Float,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    pub kind: KindArg,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "exact")]
    pub arithmetic: ArithArg,
    #[arg(long, value_enum, default_value = "strict")]
    pub mode: ModeArg,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// Comma-separated entries; exact mode also accepts `p/q`.
    #[arg(long, allow_hyphen_values = true)]
    pub v: String,
    #[arg(long, value_enum, default_value = "float")]
    pub mode: ArithArg,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Configuration file, or `-` for stdin (the default).
    #[arg(long)]
    pub config: Option<String>,
    /// Override the crossing mode stored in the configuration.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, value_enum, default_value = "json")]
    pub report: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Dyadic,
    Simple,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Edges,
    Bias,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Configuration file, or `-` for stdin.
    #[arg(long)]
    pub config: String,
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    #[arg(long, value_enum, default_value = "dyadic")]
    pub variant: Variant,
    #[arg(long, value_enum, default_value = "edges")]
    pub emit: Emit,
    /// Emit dyadic bias vectors without the `|P|_inf <= 1/2` conditioning.
    #[arg(long)]
    pub unconditioned: bool,
}

#[derive(Debug, Args)]
pub struct QfuncArgs {
    /// Comma-separated coefficients.
    #[arg(long, allow_hyphen_values = true)]
    pub v: String,
    /// Comma-separated biases (defaults to all zero).
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    #[arg(long)]
    pub alpha: String,
    #[arg(long, value_enum, default_value = "float")]
    pub mode: ArithArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Estimator {
    Evasion,
    LinfTail,
    Glue,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    pub estimator: Estimator,
    /// Configuration file; otherwise planes come from `--construction` or
    /// are drawn at random from `--n` and `--m`.
    #[arg(long, conflicts_with = "construction")]
    pub config: Option<String>,
    #[arg(long)]
    pub construction: Option<KindArg>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    /// Plane used by the glue estimator.
    #[arg(long, default_value_t = 0)]
    pub plane: usize,
    /// Threshold used by the glue estimator (defaults to the plane's own).
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 10_000)]
    pub iters: u64,
    #[arg(long, default_value_t = 1)]
    pub replicas: usize,
    #[arg(long, default_value_t = 8)]
    pub coeff_range: i64,
    #[arg(long, value_enum, default_value = "strict")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma-separated dimensions.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// Comma-separated plane counts (defaults to `round(n^(2/3))`).
    #[arg(long, value_delimiter = ',')]
    pub m: Vec<usize>,
    /// Comma-separated cell kinds: random, axis, middle_layers.
    #[arg(long, value_delimiter = ',', default_value = "random", value_parser = parse_cell_kind)]
    pub kinds: Vec<CellKind>,
    /// Comma-separated cell seeds (defaults to `--seed`).
    #[arg(long, value_delimiter = ',')]
    pub seeds: Vec<u64>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

fn parse_cell_kind(s: &str) -> Result<CellKind, String> {
    s.parse().map_err(|e: slicer::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t as usize).build_global() {
            eprintln!("warning: could not configure thread pool: {e}");
        }
    }
    let started = Instant::now();
    match commands::run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            if let Some(dir) = &cli.global.out {
                if let Err(e) = output::write_artifacts(dir, &cli, &out, started.elapsed()) {
                    output::report_error(&e);
                    return ExitCode::from(1);
                }
            }
            ExitCode::from(out.exit)
        }
        Err(e) => {
            output::report_error(&e);
            ExitCode::from(1)
        }
    }
}
