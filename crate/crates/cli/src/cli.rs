//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub const THREADS_ENV: &str = "COLORTREE_THREADS";

#[derive(Debug, Parser, Serialize)]
#[command(name = "colortree", version, about = "Criticality and simulation for random environments on coloured trees")]
pub struct Cli {
    /// Worker threads for trial-level parallelism (default: all cores).
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Regime verdicts for an environment, as JSON.
    Classify(ClassifyArgs),
    /// Criticality constant across a built-in family, and its crossing of 1.
    Sweep(SweepArgs),
    /// Rate function on a grid of z.
    RateFunction(RateArgs),
    #[command(subcommand)]
    Simulate(Simulate),
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Simulate {
    /// Per-level sums of ζ^s against the exact moments.
    Tree(TreeArgs),
    /// Random walks in random jump-vector environments.
    Walk(WalkArgs),
    /// Population dynamics for Y = e + ΞY.
    Rde(RdeArgs),
    /// Minimal position of the branching random walk.
    Brw(BrwArgs),
    /// Reachable-set sizes for first-passage percolation.
    Fpp(FppArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct Output {
    /// Output file; a `<out>.manifest.json` is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ClassifyArgs {
    /// Environment JSON file or built-in family (`NAME[:PARAM]`).
    #[arg(long)]
    pub env: String,
    #[arg(long, default_value_t = colortree_core::classifier::DEFAULT_EPS_CRITICAL)]
    pub eps_critical: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetArg {
    Lambda1,
    Lambda,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    /// sec51, pointmass-b2 or normal01.
    #[arg(long)]
    pub family: String,
    /// `LO:HI`, in either order.
    #[arg(long, allow_hyphen_values = true)]
    pub param_range: String,
    #[arg(long, value_enum, default_value_t = TargetArg::Lambda1)]
    pub target: TargetArg,
    /// Grid points in the CSV.
    #[arg(long, default_value_t = 17)]
    pub points: usize,
    /// Bisection tolerance on the parameter.
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct RateArgs {
    #[arg(long)]
    pub env: String,
    /// `LO:HI:N`, N evenly spaced points including both ends.
    #[arg(long, allow_hyphen_values = true)]
    pub z: String,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct TreeArgs {
    #[arg(long)]
    pub env: String,
    #[arg(long)]
    pub depth: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Exponent of ζ in the level sums.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub s: f64,
    /// Also report the mean count of ζ > x per level.
    #[arg(long)]
    pub x: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct WalkArgs {
    /// Jump-vector JSON file (`{"laws": [...]}`) or `sec51[:h]`.
    #[arg(long, alias = "spec")]
    pub rwre: String,
    #[arg(long)]
    pub steps: u64,
    #[arg(long, default_value_t = 1)]
    pub walks: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Depth up to which occupation is recorded per level.
    #[arg(long, default_value_t = 10)]
    pub cut_depth: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct RdeArgs {
    #[arg(long)]
    pub env: String,
    #[arg(long, default_value_t = 10_000)]
    pub pool: usize,
    #[arg(long, default_value_t = 100)]
    pub iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OverflowArg {
    KeepLowest,
    Error,
}

#[derive(Debug, Args, Serialize)]
pub struct BrwArgs {
    /// Step-law JSON file or built-in family (`normal01[:mu]`, `pointmass-b2[:c]`).
    #[arg(long)]
    pub spec: String,
    /// Number of generations.
    #[arg(long)]
    pub t: usize,
    #[arg(long, default_value_t = 50)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Particles more than this above the minimum are discarded.
    #[arg(long, default_value_t = colortree_core::brw::DEFAULT_WINDOW)]
    pub window: f64,
    #[arg(long, default_value_t = colortree_core::brw::DEFAULT_FRONTIER_BUDGET)]
    pub budget: usize,
    /// What to do when the pruned frontier exceeds the budget.
    #[arg(long, value_enum, default_value_t = OverflowArg::KeepLowest)]
    pub overflow: OverflowArg,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct FppArgs {
    /// Passage-time JSON file (same format as `simulate brw`) or built-in family.
    #[arg(long)]
    pub spec: String,
    #[arg(long, allow_hyphen_values = true)]
    pub t: f64,
    #[arg(long)]
    pub depth: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}
