//! Command-line arguments. The parsed structures double as the resolved run
//! configuration: every field carries its default, and the whole tree is written back
//! into each JSON result so a run can be replayed.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "indset", version, about = "Count and sample independent sets in regular bipartite graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Generate an instance in the graph text format.
    Gen(GenArgs),
    /// Count independent sets (or the hard-core partition function).
    Count(CountArgs),
    /// Draw independent sets.
    Sample(SampleArgs),
    /// Check the Kotecký–Preiss condition polymer by polymer.
    VerifyKp(KpArgs),
    /// Count through size-T certificates and print the certificate census.
    Certify(CertifyArgs),
    /// Test the vertex-expansion promise.
    CheckExpander(CheckExpanderArgs),
    /// Time several methods over a list of instances and print CSV.
    Bench(BenchArgs),
    /// Re-run the configuration stored in a previous JSON result.
    #[serde(skip)]
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct Common {
    /// Output file (standard output when absent).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Worker threads; 0 means all available cores.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GraphInput {
    /// Graph file in the `p bis` text format, or `-` for standard input.
    #[arg(long, short)]
    pub graph: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Cycle,
    Hypercube,
    Complete,
    Random,
    Torus,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// Cycle length (even, at least 4).
    #[arg(long)]
    pub m: Option<usize>,
    /// Degree (hypercube dimension, complete bipartite side, random degree).
    #[arg(long)]
    pub d: Option<usize>,
    /// Vertices per side of a random instance.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Torus side lengths, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub dims: Vec<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountMode {
    Oracle,
    Expander,
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyArg {
    Auto,
    Brute,
    Expansion,
}

/// Constants shared by the approximate algorithms.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct Constants {
    /// Expansion constant C1 in the expanding-set inequality.
    #[arg(long, default_value_t = 100.0)]
    pub c1: f64,
    /// Vertex-expansion promise alpha.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c4: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c5: f64,
    /// Largest number of polymers in one cluster.
    #[arg(long, default_value_t = 20)]
    pub max_cluster_polymers: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct LambdaArgs {
    /// Fugacity as `p/q`, an integer or a terminating decimal.
    #[arg(long)]
    pub lambda: Option<String>,
    /// Accept a floating-point fugacity such as `1e-3`.
    #[arg(long)]
    pub float_lambda: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CountArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: GraphInput,
    #[arg(long, value_enum, default_value_t = CountMode::Expander)]
    pub mode: CountMode,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub lambda: LambdaArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub constants: Constants,
    /// Expander mode: exact count or cluster expansion.
    #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
    pub strategy: StrategyArg,
    /// Check the Kotecký–Preiss condition on the truncated universes.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub check_kp: bool,
    /// General mode: exhaustive D values and exact restricted partition functions.
    #[arg(long)]
    pub exact: bool,
    /// Include the clusters of the X-side expansion.
    #[arg(long)]
    pub dump_clusters: bool,
    /// Oracle mode: include the probability of every independent set.
    #[arg(long)]
    pub dump_dist: bool,
    /// Most entries printed by a dump.
    #[arg(long, default_value_t = 1000)]
    pub dump_limit: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleMode {
    Oracle,
    Expander,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerArg {
    Auto,
    Exact,
    SelfReducible,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SampleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: GraphInput,
    #[arg(long, value_enum, default_value_t = SampleMode::Expander)]
    pub mode: SampleMode,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub samples: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub lambda: LambdaArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub constants: Constants,
    #[arg(long, value_enum, default_value_t = SamplerArg::Auto)]
    pub sampler: SamplerArg,
    /// Largest number of tabulated polymer configurations per side.
    #[arg(long, default_value_t = 1 << 20)]
    pub config_cap: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    Expanding,
    Small,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SideArg {
    X,
    Y,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct KpArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: GraphInput,
    #[arg(long, value_enum, default_value_t = FamilyArg::Expanding)]
    pub family: FamilyArg,
    #[arg(long, value_enum, default_value_t = SideArg::X)]
    pub side: SideArg,
    /// Largest polymer checked.
    #[arg(long, default_value_t = 4)]
    pub cap: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub lambda: LambdaArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub constants: Constants,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CertifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: GraphInput,
    /// Certificate size T.
    #[arg(long, short, default_value_t = 2)]
    pub t: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckMethod {
    Exhaustive,
    Heuristic,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CheckExpanderArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: GraphInput,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = CheckMethod::Exhaustive)]
    pub method: CheckMethod,
    /// Largest side accepted by the exhaustive check.
    #[arg(long, default_value_t = 20)]
    pub cap: usize,
    /// Random sets tried by the heuristic check.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Largest 2-linked set enumerated by the heuristic check.
    #[arg(long, default_value_t = 6)]
    pub linked_cap: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BenchArgs {
    /// Instances such as `cycle:8`, `hypercube:4`, `complete:3`, `random:10:3:7` (n:d:seed)
    /// or `torus:4x4`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub instances: Vec<String>,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [CountMode::Oracle, CountMode::Expander])]
    pub modes: Vec<CountMode>,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub constants: Constants,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// A JSON result (or bare configuration) produced by an earlier run.
    pub config: PathBuf,
    /// Overrides the stored output path.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}
