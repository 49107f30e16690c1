use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "entroof", version, about = "Entanglement measures, convex roofs and LOCC audits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a measure on a pure-state file.
    Measure(MeasureCmd),
    /// Optimize the convex (or concave) roof of a measure on a density file.
    Roof(RoofCmd),
    /// Tabulate the p-number over a grid of p values.
    Sweep(SweepCmd),
    /// Run an LOCC tree on a state and audit monotonicity node by node.
    Locc(LoccCmd),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LogBaseArg {
    #[value(name = "2")]
    Two,
    #[value(name = "e")]
    E,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Min,
    Max,
}

#[derive(Debug, Clone, Args)]
pub struct MeasureParams {
    /// Measure: e (entanglement-number), p-number, entropy, negativity, concurrence, geometric.
    #[arg(long)]
    pub measure: String,
    /// Order p > 1 of the p-number (required for p-number; no default).
    #[arg(long)]
    pub p: Option<f64>,
    /// Concurrence order k in [1, min(dimA, dimB)] (required for concurrence; no default).
    #[arg(long)]
    pub k: Option<usize>,
    /// Comma-separated projector ranks for the geometric measure, e.g. 1,1 (default: 1,1).
    #[arg(long)]
    pub ranks: Option<String>,
    /// Logarithm base for entropies.
    #[arg(long, value_enum, default_value = "2")]
    pub log_base: LogBaseArg,
}

#[derive(Debug, Clone, Args)]
pub struct RoofFlags {
    /// Ensemble size m in [rank, rank^2] (default: rank^2).
    #[arg(long)]
    pub m: Option<usize>,
    /// Independent seeded restarts.
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    /// Seed of the restart generators.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Stop once the objective improves by less than this over 20 iterations.
    #[arg(long, default_value = "1e-9")]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct OutFlag {
    /// Also write the report to this path (default: standard output only).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct MeasureCmd {
    /// Pure-state file.
    pub state: PathBuf,
    #[command(flatten)]
    pub params: MeasureParams,
    #[command(flatten)]
    pub out: OutFlag,
}

#[derive(Debug, Clone, Args)]
pub struct RoofCmd {
    /// Density-operator file (pure-state files are accepted and promoted).
    pub state: PathBuf,
    #[command(flatten)]
    pub params: MeasureParams,
    #[command(flatten)]
    pub roof: RoofFlags,
    /// Convex roof (min) or concave roof (max).
    #[arg(long, value_enum, default_value = "min")]
    pub direction: DirectionArg,
    #[command(flatten)]
    pub out: OutFlag,
}

#[derive(Debug, Clone, Args)]
pub struct SweepCmd {
    /// Pure-state or density file.
    pub state: PathBuf,
    #[command(flatten)]
    pub params: MeasureParams,
    /// Inclusive grid START:STOP:STEP with START > 1.
    #[arg(long)]
    pub p_grid: String,
    #[command(flatten)]
    pub roof: RoofFlags,
    #[command(flatten)]
    pub out: OutFlag,
}

#[derive(Debug, Clone, Args)]
pub struct LoccCmd {
    /// LOCC tree file.
    pub tree: PathBuf,
    /// Pure-state or density file.
    pub state: PathBuf,
    #[command(flatten)]
    pub params: MeasureParams,
    #[command(flatten)]
    pub roof: RoofFlags,
    #[command(flatten)]
    pub out: OutFlag,
}
