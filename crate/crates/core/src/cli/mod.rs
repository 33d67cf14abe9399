mod commands;
mod load;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::run;

#[derive(Debug, Parser)]
#[command(name = "tapmech", version, about = "Strategyproof traffic assignment toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a generated instance to stdout.
    GenInstance(GenArgs),
    /// Run a mechanism and print the allocation.
    Solve(SolveArgs),
    /// Audit a mechanism for manipulations and efficiency properties.
    Audit(AuditArgs),
    /// Run the capacity-augmentation sweep and write CSV.
    Bench(BenchArgs),
    /// Build the time-expanded network and route the agents on it.
    ExpandTime(ExpandArgs),
    /// Print structural statistics of a network.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(subcommand)]
    pub kind: GenKind,
}

#[derive(Debug, Subcommand)]
pub enum GenKind {
    /// Two-agent lower-bound instance.
    Fig1 {
        /// Weight parameter K (default 2).
        #[arg(long, conflicts_with = "eps")]
        k: Option<f64>,
        /// Derive K = min{2, (10-4ε)/ε}.
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Unit-capacity instance where SD pays 2^n - 1.
    SdTight {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
    },
    /// Chain-of-levels instance.
    Chain {
        #[arg(long)]
        k: usize,
    },
    /// Object-assignment reduction; one `;`-separated rank vector per agent.
    TapPlus {
        /// e.g. `1,2,3;3,2,1`
        #[arg(long)]
        profile: String,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        /// Add a destination for every strict order.
        #[arg(long)]
        all_orders: bool,
    },
    /// One of the two instances of the randomized lower bound.
    Yao {
        #[arg(long, value_enum, default_value_t = YaoPart::Base)]
        which: YaoPart,
    },
    /// Random population on a given network.
    Random {
        /// `.tap` instance, `.gr` DIMACS file, or `gen:rome[:SEED]`.
        #[arg(long)]
        graph: String,
        /// Number of agents (default: a third of the nodes).
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Keep only the first N nodes (with shortcuts).
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long, default_value = "const:27")]
        capacity: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum YaoPart {
    Base,
    Variant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MechKind {
    Sd,
    Bsd,
    Rsd,
    Opt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Path,
    Edge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

#[derive(Debug, Args)]
pub struct MechArgs {
    #[arg(long, value_enum)]
    pub mech: MechKind,
    #[arg(long)]
    pub instance: std::path::PathBuf,
    /// Agent ids in priority order, e.g. `2,1`.
    #[arg(long, value_delimiter = ',')]
    pub ordering: Option<Vec<String>>,
    /// Seed of the random ordering (rsd).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Edges in X_2 for bsd, e.g. `A>B,B>C`.
    #[arg(long, value_delimiter = ',')]
    pub x2: Option<Vec<String>>,
    #[arg(long, value_enum, default_value_t = RuleArg::Path)]
    pub swap_rule: RuleArg,
    /// Search-node budget for opt.
    #[arg(long, default_value_t = 2_000_000)]
    pub budget: u64,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub mech: MechArgs,
    /// Also print the expected RSD cost: `exact` or `mc:K`.
    #[arg(long)]
    pub expect: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Manipulation,
    Theorem1,
    Pareto,
    NonBossy,
    Docp,
    All,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub mech: MechArgs,
    /// Restrict to one agent id.
    #[arg(long)]
    pub agent: Option<String>,
    /// Candidate reports (node names); default all nodes.
    #[arg(long, value_delimiter = ',')]
    pub reports: Option<Vec<String>>,
    #[arg(long, value_enum, default_value_t = Check::Manipulation)]
    pub check: Check,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// `.gr` DIMACS file, `.tap` instance, or `gen:rome[:SEED]`,
    /// `gen:sd-tight:N`, `gen:fig1`, `gen:chain:K`.
    #[arg(long)]
    pub graph: String,
    /// Keep only the first N nodes (with shortcuts).
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Random agents per trial (default: the source's own agents, or a
    /// third of the nodes).
    #[arg(long)]
    pub agents: Option<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1,1.2,1.4,1.6,1.8,2")]
    pub gamma: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "ref", default_value = "proxy")]
    pub reference: String,
    /// `exact` or `mc:K`.
    #[arg(long, default_value = "mc:32")]
    pub rsd: String,
    #[arg(long, default_value = "const:27")]
    pub capacity: String,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    #[arg(long)]
    pub instance: std::path::PathBuf,
    /// Number of time layers (default: agents × max transit × hop diameter + 1).
    #[arg(long)]
    pub horizon: Option<u32>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// `.tap` instance, `.gr` DIMACS file, or `gen:rome[:SEED]`.
    #[arg(long)]
    pub graph: String,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long, default_value = "const:27")]
    pub capacity: String,
    /// Check k-edge-connectivity.
    #[arg(long)]
    pub k: Option<u32>,
}
