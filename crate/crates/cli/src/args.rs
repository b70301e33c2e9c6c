use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ramp_storage::market::MarketConfig;
use serde::{Deserialize, Serialize};

use crate::law::LawArgs;

/// Subcommand names, which double as config-file table names.
pub const COMMANDS: &[&str] = &[
    "thresholds",
    "simulate",
    "competitive-ratio",
    "value-sweep",
    "bound",
    "two-point",
    "stationary",
    "phase-map",
    "elasticity",
    "reserves",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "ramp-storage", version, about = "Threshold policies and value of ramp-constrained energy storage")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct GlobalArgs {
    /// TOML experiment file; flags override its values
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output format [default: csv]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for randomized subcommands; a fresh one is drawn and reported when absent
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Cap on worker threads
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Finite-horizon threshold table and value of storage
    Thresholds(ThresholdsArgs),
    /// Monte Carlo value of the threshold policy with sample trajectories
    Simulate(SimulateArgs),
    /// Policy against perfect foresight, day by day, on a price CSV
    CompetitiveRatio(CompetitiveArgs),
    /// Value of storage over a grid of capacity ratios and volatilities
    ValueSweep(SweepArgs),
    /// Largest long-run value over all laws on a price interval
    Bound(BoundArgs),
    /// Long-run value and steady state under a two-point law
    TwoPoint(TwoPointArgs),
    /// Long-run average value and differential cost for a price law
    Stationary(StationaryArgs),
    /// Buy and sell edges of the stationary policy per state
    PhaseMap(PhaseMapArgs),
    /// Average response of the store to price and its elasticity
    Elasticity(ElasticityArgs),
    /// Reserve requirements with and without storage in the market
    Reserves(ReservesArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Thresholds(_) => "thresholds",
            Command::Simulate(_) => "simulate",
            Command::CompetitiveRatio(_) => "competitive-ratio",
            Command::ValueSweep(_) => "value-sweep",
            Command::Bound(_) => "bound",
            Command::TwoPoint(_) => "two-point",
            Command::Stationary(_) => "stationary",
            Command::PhaseMap(_) => "phase-map",
            Command::Elasticity(_) => "elasticity",
            Command::Reserves(_) => "reserves",
        }
    }
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdsArgs {
    #[command(flatten)]
    #[serde(default)]
    pub prices: LawArgs,
    /// Horizon in stages [default: 24]
    #[arg(long)]
    pub n_stages: Option<usize>,
    /// Ramp limit per stage, MWh [default: 1]
    #[arg(long)]
    pub vbar: Option<f64>,
    /// Capacity as a multiple of the ramp limit [default: 4]
    #[arg(long)]
    pub n: Option<usize>,
    /// Credit per MWh left at the end [default: mean price]
    #[arg(long, allow_negative_numbers = true)]
    pub salvage: Option<f64>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(default)]
    pub prices: LawArgs,
    /// Horizon in stages [default: 24]
    #[arg(long)]
    pub n_stages: Option<usize>,
    /// Ramp limit per stage, MWh [default: 1]
    #[arg(long)]
    pub vbar: Option<f64>,
    /// Capacity as a multiple of the ramp limit [default: 4]
    #[arg(long)]
    pub n: Option<usize>,
    /// Credit per MWh left at the end [default: mean price]
    #[arg(long, allow_negative_numbers = true)]
    pub salvage: Option<f64>,
    /// Simulated horizons [default: 10000]
    #[arg(long)]
    pub n_paths: Option<usize>,
    /// Sample trajectories written to the table [default: 1]
    #[arg(long)]
    pub trajectories: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SourceKind {
    /// Empirical law of all days in the file
    SameMonth,
    /// Empirical law of the preceding days
    PastDays,
    /// The law in the `known` table of the experiment file
    Known,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompetitiveArgs {
    /// Price CSV with `timestamp,price` rows
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Prices per day after the hour window [default: 16]
    #[arg(long)]
    pub n_stages: Option<usize>,
    /// Ramp limit per stage, MWh [default: 1]
    #[arg(long)]
    pub vbar: Option<f64>,
    /// Capacity as a multiple of the ramp limit [default: 4]
    #[arg(long)]
    pub n: Option<usize>,
    /// Bin width of the empirical law; exact values when absent
    #[arg(long)]
    pub bin_width: Option<f64>,
    /// First hour of the day kept [default: 8]
    #[arg(long)]
    pub start_hour: Option<u32>,
    /// End of the kept window, exclusive [default: 24]
    #[arg(long)]
    pub end_hour: Option<u32>,
    /// Keep days whose mean is within this many standard deviations; all days when absent or inf
    #[arg(long)]
    pub filter_sigma: Option<f64>,
    /// Where the policy's price law comes from [default: same-month]
    #[arg(long, value_enum)]
    pub source: Option<SourceKind>,
    /// Trailing window for `past-days` [default: 30]
    #[arg(long)]
    pub past_days: Option<usize>,
    /// Price law for `known`, set in the experiment file
    #[arg(skip)]
    pub known: Option<LawArgs>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SweepFamily {
    Lognormal,
    Uniform,
    TwoPoint,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepArgs {
    /// Comma-separated capacity ratios [default: 1,2,3,5,10,20,40]
    #[arg(long, value_delimiter = ',')]
    pub ns: Option<Vec<usize>>,
    /// Comma-separated standard deviations [default: 0,5,10,...,40]
    #[arg(long, value_delimiter = ',')]
    pub sigmas: Option<Vec<f64>>,
    /// Price law family [default: lognormal]
    #[arg(long, value_enum)]
    pub family: Option<SweepFamily>,
    /// Mean price [default: 50]
    #[arg(long)]
    pub mean: Option<f64>,
    /// Support points of the discretized law [default: 200]
    #[arg(long)]
    pub support_points: Option<usize>,
    /// Lognormal support ends this many standard deviations above the mean [default: 6]
    #[arg(long)]
    pub truncation_sigmas: Option<f64>,
    /// Horizon in stages [default: 24]
    #[arg(long)]
    pub n_stages: Option<usize>,
    /// Ramp limit per stage, MWh [default: 10]
    #[arg(long)]
    pub vbar: Option<f64>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundArgs {
    /// Ramp limit per stage, MWh [default: 1]
    #[arg(long)]
    pub vbar: Option<f64>,
    /// Capacity as a multiple of the ramp limit [default: 1]
    #[arg(long)]
    pub n: Option<usize>,
    /// Lowest price [default: 0]
    #[arg(long, allow_negative_numbers = true)]
    pub lo: Option<f64>,
    /// Highest price [default: 1]
    #[arg(long, allow_negative_numbers = true)]
    pub hi: Option<f64>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoPointArgs {
    /// Probability of the high price [default: 0.5]
    #[arg(long, conflicts_with = "mean")]
    pub a: Option<f64>,
    /// Fix the mean instead of `a`
    #[arg(long)]
    pub mean: Option<f64>,
    /// Capacity as a multiple of the ramp limit [default: 1]
    #[arg(long)]
    pub n: Option<usize>,
    /// Ramp limit per stage, MWh [default: 1]
    #[arg(long)]
    pub vbar: Option<f64>,
    /// Low price [default: 0]
    #[arg(long, allow_negative_numbers = true)]
    pub lo: Option<f64>,
    /// High price [default: 1]
    #[arg(long, allow_negative_numbers = true)]
    pub hi: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    Rvi,
    PolicyIteration,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverArgs {
    /// Stopping tolerance on the span of the update [default: 1e-9 times max price times vbar]
    #[arg(long)]
    pub tol: Option<f64>,
    /// Iteration limit [default: 1000000]
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Step size of the relative value update, in (0, 1] [default: 1]
    #[arg(long)]
    pub damping: Option<f64>,
    /// Solver [default: rvi]
    #[arg(long, value_enum)]
    pub engine: Option<Engine>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationaryArgs {
    #[command(flatten)]
    #[serde(default)]
    pub prices: LawArgs,
    /// Capacity as a multiple of the ramp limit [default: 5]
    #[arg(long)]
    pub n: Option<usize>,
    /// Ramp limit per stage, MWh [default: 1]
    #[arg(long)]
    pub vbar: Option<f64>,
    #[command(flatten)]
    #[serde(default)]
    pub solver: SolverArgs,
    /// Also simulate the policy for this many stages [default: 0]
    #[arg(long)]
    pub chain_steps: Option<usize>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseMapArgs {
    #[command(flatten)]
    #[serde(default)]
    pub prices: LawArgs,
    /// Capacity as a multiple of the ramp limit [default: 10]
    #[arg(long)]
    pub n: Option<usize>,
    /// Ramp limit per stage, MWh [default: 1]
    #[arg(long)]
    pub vbar: Option<f64>,
    #[command(flatten)]
    #[serde(default)]
    pub solver: SolverArgs,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElasticityArgs {
    #[command(flatten)]
    #[serde(default)]
    pub prices: LawArgs,
    /// Horizon in stages [default: 288]
    #[arg(long)]
    pub n_stages: Option<usize>,
    /// Ramp limit per stage, MWh [default: 10]
    #[arg(long)]
    pub vbar: Option<f64>,
    /// Capacity as a multiple of the ramp limit [default: 5]
    #[arg(long)]
    pub n: Option<usize>,
    /// Credit per MWh left at the end [default: mean price]
    #[arg(long, allow_negative_numbers = true)]
    pub salvage: Option<f64>,
    /// Simulated horizons [default: 10000]
    #[arg(long)]
    pub n_paths: Option<usize>,
    /// Equal-width price bins [default: 40]
    #[arg(long)]
    pub n_bins: Option<usize>,
    /// Inflexible demand added to the store's response, MWh [default: 3 vbar]
    #[arg(long)]
    pub d_firm: Option<f64>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReservesArgs {
    /// Market profile TOML (supply, demand, renewable and error blocks)
    #[arg(long)]
    pub market_config: Option<PathBuf>,
    /// Market profile given inline in the experiment file
    #[arg(skip)]
    pub market: Option<MarketConfig>,
    /// Ramp limit per period, MWh [default: 1]
    #[arg(long)]
    pub vbar: Option<f64>,
    /// Capacity as a multiple of the ramp limit [default: 5]
    #[arg(long)]
    pub n: Option<usize>,
    /// Simulated periods [default: 20000]
    #[arg(long)]
    pub n_periods: Option<usize>,
    /// Periods of the storage-free run used to fit the policy's price law [default: 20000]
    #[arg(long)]
    pub pilot_periods: Option<usize>,
    /// Directory for the `draw_mwh,count` histogram CSVs
    #[arg(long)]
    pub histograms: Option<PathBuf>,
}
