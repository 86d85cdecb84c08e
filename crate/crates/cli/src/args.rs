use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "tailsum",
    version,
    about = "Sum-product tail statistics, their limit covariances, and verification runs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Subcommands. The serialized form (`command` + `params`) is what a
/// manifest stores and what `replay` reads back.
#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", content = "params", rename_all = "lowercase")]
pub enum Command {
    /// T_n(1..pmax), index estimates and LIL envelopes for a data file
    Estimate(EstimateArgs),
    /// Type I/II/III number tables
    Tables(TablesArgs),
    /// Covariance matrix of the limit process
    Covariance(CovarianceArgs),
    /// Monte Carlo check of the central limit theorems
    Mc(McArgs),
    /// Quadrature oracle for the covariance factor a(r, rho)
    Oracle(OracleArgs),
    /// Write draws from a test distribution, one per line
    Sample(SampleArgs),
    /// Re-run the command recorded in a report's manifest
    #[serde(skip)]
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Estimate(_) => "estimate",
            Command::Tables(_) => "tables",
            Command::Covariance(_) => "covariance",
            Command::Mc(_) => "mc",
            Command::Oracle(_) => "oracle",
            Command::Sample(_) => "sample",
            Command::Replay(_) => "replay",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Beta,
    Mu0,
    Mu1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainArg {
    Frechet,
    Weibull,
    Gumbel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistArg {
    Pareto,
    PowerEndpoint,
    StretchedTail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CenteringArg {
    /// centre at tau_p of the random threshold
    Random,
    /// centre at the deterministic threshold
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct OutputArgs {
    /// Write here instead of stdout
    #[arg(long)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
    /// Defaults to csv for `tables`, json otherwise
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct EstimateArgs {
    /// Observations (positive), one per line
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub l: usize,
    #[arg(long, default_value_t = 4)]
    pub pmax: usize,
    /// Domain assumed for the LIL envelope
    #[arg(long, value_enum, default_value_t = DomainArg::Frechet)]
    pub domain: DomainArg,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct TablesArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Required for mu0 and mu1
    #[arg(long)]
    pub tau: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub vmax: usize,
    #[arg(long, default_value_t = 10)]
    pub dmax: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CovarianceArgs {
    #[arg(long, value_enum)]
    pub domain: DomainArg,
    /// Required for weibull
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 4)]
    pub pmax: usize,
    /// Covariance of the deterministically centred process
    #[arg(long)]
    pub reduced: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct McArgs {
    #[arg(long, value_enum)]
    pub dist: DistArg,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Endpoint of the power-endpoint distribution
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<f64>,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub l: usize,
    #[arg(long, default_value_t = 4)]
    pub pmax: usize,
    #[arg(long)]
    pub reps: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = CenteringArg::Random)]
    pub centering: CenteringArg,
    /// Worker threads (0: all cores); does not change the output
    #[arg(long, default_value_t = 0)]
    #[serde(skip)]
    pub threads: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct OracleArgs {
    pub r: usize,
    pub rho: usize,
    #[arg(long, default_value_t = 1024)]
    pub grid: usize,
    /// Upper cut-off S of the improper integrals
    #[arg(long, default_value_t = 60.0, allow_hyphen_values = true)]
    pub truncation: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub dist: DistArg,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<f64>,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct ReplayArgs {
    /// A report written by any other subcommand
    pub manifest: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
}
