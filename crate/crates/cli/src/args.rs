use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "iqae",
    version,
    about = "Iterative amplitude estimation bias laboratory"
)]
pub struct Cli {
    /// Worker threads (0 = all available cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One run of the estimator, printed as JSON.
    Run(RunArgs),
    /// Bias statistics over a grid of amplitudes.
    Sweep(SweepArgs),
    /// Conditional bias of the final round over a (k_fin, f_fin) grid.
    CondBias(CondBiasArgs),
    /// Final-round (k_fin, f_fin) of many runs.
    Scatter(ScatterArgs),
    /// Confidence interval ends and accuracy against the estimate in one round.
    CiProfile(CiProfileArgs),
    /// Closest resonant angle lπ/(2m) to θ_a.
    Resonance(ResonanceArgs),
    /// SVG heatmap of a cond-bias CSV, with optional scatter overlay.
    Render(RenderArgs),
}

#[derive(Debug, Clone, Args)]
pub struct EngineArgs {
    /// Target accuracy ε.
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
    /// Failure budget α.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Shots per batch.
    #[arg(long, default_value_t = 1)]
    pub n_shot: u64,
    /// Minimum growth ratio of 2k+1 between rounds.
    #[arg(long, default_value_t = 2.0)]
    pub r_min: f64,
    /// Abort a run after this many rounds.
    #[arg(long, default_value_t = 10_000)]
    pub max_rounds: usize,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// True amplitude.
    #[arg(long)]
    pub a: f64,
    /// Re-execute the final round and report its estimate.
    #[arg(long)]
    pub mitigate: bool,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 0.001)]
    pub a_min: f64,
    #[arg(long, default_value_t = 0.999)]
    pub a_max: f64,
    /// Grid points, ends included.
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    /// Runs per grid point.
    #[arg(long, default_value_t = 10_000)]
    pub runs: usize,
    #[arg(long)]
    pub mitigate: bool,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CondBiasArgs {
    /// Baseline amplitude.
    #[arg(long, default_value_t = 0.2505)]
    pub a: f64,
    /// Grover numbers, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "200")]
    pub k_list: Vec<u64>,
    /// f_fin grid points in [0, 1] (default 51 for one k, 101 otherwise).
    #[arg(long)]
    pub f_points: Option<usize>,
    /// Runs per cell.
    #[arg(long, default_value_t = 10_000)]
    pub runs: usize,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ScatterArgs {
    #[arg(long, default_value_t = 0.2505)]
    pub a: f64,
    #[arg(long, default_value_t = 10_000)]
    pub runs: usize,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CiProfileArgs {
    /// Grover number of the round.
    #[arg(long)]
    pub k: u64,
    /// Shots taken in the round.
    #[arg(long, default_value_t = 100)]
    pub n: u64,
    /// Amplitude selecting the quadrant.
    #[arg(long)]
    pub a: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ResonanceArgs {
    #[arg(long)]
    pub a: f64,
    /// Largest denominator m.
    #[arg(long, default_value_t = 200)]
    pub m_max: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// cond-bias CSV.
    #[arg(long)]
    pub input: PathBuf,
    /// scatter CSV drawn on top.
    #[arg(long)]
    pub scatter: Option<PathBuf>,
    /// SVG file.
    #[arg(long)]
    pub out: PathBuf,
    /// Colour scale limit (default: largest |b_tilde|).
    #[arg(long)]
    pub scale: Option<f64>,
}
