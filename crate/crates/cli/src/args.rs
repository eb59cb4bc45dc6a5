use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mixnet_core::{Criterion, HoldingTime, Prior, RateForm, Rule};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "mixnet", version, about = "Structure learning for mixed graphical models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Draw a random graph and model, then sample replicate datasets.
    Simulate(SimulateArgs),
    /// Learn a graph from a data CSV.
    Learn(LearnArgs),
    /// Score estimated graphs against the truth.
    Eval(EvalArgs),
    /// Re-run a previous simulate, learn or eval run from its manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    /// Barabasi-Albert preferential attachment, one edge per new vertex.
    Scalefree,
    /// Erdos-Renyi with independent edge probability `--edge-prob`.
    Random,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = Topology::Scalefree)]
    pub topology: Topology,
    /// Number of variables (at least 2).
    #[arg(long)]
    pub p: usize,
    /// Kind mix in vertex order, e.g. g25b15c10. Defaults to all Gaussian.
    #[arg(long)]
    pub kinds: Option<String>,
    /// Rows per dataset.
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    /// Number of replicate datasets drawn from the same model.
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Edge probability for the random topology.
    #[arg(long, default_value_t = 0.1)]
    pub edge_prob: f64,
    /// Gibbs sweeps discarded before recording.
    #[arg(long, default_value_t = 1000)]
    pub burn_in: usize,
    /// Keep every this-many Gibbs sweeps.
    #[arg(long, default_value_t = 10)]
    pub thin: usize,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct LearnArgs {
    /// Data CSV with a `name:kind` header (kinds g, b, c).
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "ebic")]
    pub criterion: Criterion,
    /// EBIC weight in [0, 1].
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    #[arg(long, default_value = "dm")]
    pub prior: Prior,
    #[arg(long, default_value_t = 0.5)]
    pub prior_a: f64,
    /// Birth-death jumps per vertex.
    #[arg(long, default_value_t = 200)]
    pub iters: usize,
    /// Leading jumps left out of the inclusion estimates.
    #[arg(long, default_value_t = 50)]
    pub burnin: usize,
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    #[arg(long, default_value = "and")]
    pub rule: Rule,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; all cores when unset.
    #[arg(long, env = "MIXNET_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, default_value = "mean")]
    pub holding: HoldingTime,
    #[arg(long, default_value = "balanced")]
    pub rates: RateForm,
    /// Comma-separated Gaussian columns to replace by their natural log.
    #[arg(long, value_delimiter = ',')]
    pub log_transform: Vec<String>,
    /// Center and scale Gaussian columns to unit variance.
    #[arg(long)]
    pub standardize: bool,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct EvalArgs {
    /// True edge list (TSV).
    #[arg(long, required_unless_present = "batch")]
    pub truth: Option<PathBuf>,
    /// Estimated edge list (TSV).
    #[arg(long)]
    pub estimate: Option<PathBuf>,
    /// Inclusion matrix CSV; adds AUC to the metrics or feeds `--roc`.
    #[arg(long)]
    pub inclusion: Option<PathBuf>,
    /// Number of vertices.
    #[arg(long)]
    pub p: usize,
    /// Emit ROC points instead of metrics.
    #[arg(long, requires = "inclusion")]
    pub roc: bool,
    #[arg(long, default_value = "and")]
    pub rule: Rule,
    /// ROC grid size (thresholds evenly spaced over [0, 1]).
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
    /// TSV listing `truth<TAB>estimate` paths, one replicate per line;
    /// relative paths resolve against the list's directory.
    #[arg(long, conflicts_with_all = ["truth", "estimate", "roc", "inclusion"])]
    pub batch: Option<PathBuf>,
    /// Output file; stdout when unset.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Write to this location instead of the recorded one.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, env = "MIXNET_THREADS")]
    pub threads: Option<usize>,
}
