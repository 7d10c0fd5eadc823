use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "mixcore", version, about = "2-core thresholds of mixed random hypergraphs")]
pub struct Cli {
    /// Decimal places for printed numbers
    #[arg(long, global = true, default_value_t = 5)]
    pub precision: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal mixture of two edge sizes
    Optimize(OptimizeArgs),
    /// Optimal values for a fixed a and every b in a..=b_max, as CSV
    Table(TableArgs),
    /// Failure-rate sweep around the theoretical threshold, with sigmoid fit
    Simulate(SimulateArgs),
    /// Refit a sweep CSV
    Fit(FitArgs),
    /// Write a random mixed hypergraph as an edge list
    Generate(GenerateArgs),
    /// Peel an edge list and report its 2-core
    Peel(PeelArgs),
    /// Build and verify a retrieval structure on the (3,16) optimal mixture
    RetrievalDemo(RetrievalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub a: u32,
    #[arg(long)]
    pub b: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[arg(long)]
    pub a: u32,
    #[arg(long)]
    pub b_max: u32,
}

#[derive(Debug, Clone, Args)]
pub struct MixArgs {
    /// Small edge size
    #[arg(long)]
    pub k1: u32,
    /// Large edge size; omitted means k1-uniform
    #[arg(long)]
    pub k2: Option<u32>,
    /// Fraction of k1-edges; defaults to the optimum
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub mix: MixArgs,
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    /// Density span; defaults to 0.02 for n <= 1e5 and 0.008 above
    #[arg(long)]
    pub span: Option<f64>,
    #[arg(long, default_value_t = 9)]
    pub steps: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, env = "MIXCORE_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Worker threads; 0 uses all cores
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// Sweep CSV; `-` reads standard input
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub mix: MixArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long, env = "MIXCORE_SEED", default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct PeelArgs {
    /// Edge list; `-` reads standard input
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct RetrievalArgs {
    /// Number of random keys (ignored with --input)
    #[arg(long, default_value_t = 10_000)]
    pub m: usize,
    /// Bits per value
    #[arg(long, default_value_t = 16)]
    pub r: u32,
    /// Load m/n used to size the table
    #[arg(long, default_value_t = 0.906)]
    pub c: f64,
    #[arg(long, env = "MIXCORE_SEED", default_value_t = 1)]
    pub seed: u64,
    /// key<TAB>value-hex lines instead of random pairs
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Write the serialized structure here
    #[arg(long)]
    pub output: Option<PathBuf>,
}
