use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use avalanche_core::network::Degree;
use avalanche_core::Reduction;

#[derive(Debug, Parser)]
#[command(
    name = "avalanche",
    version,
    about = "Production-inventory avalanches on supplier-client networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Random directed network: each firm pair linked with probability p.
    GenRandom(GenRandom),
    /// Preferential-attachment network on total degree.
    GenSf(GenSf),
    /// Degree CCDF of a network as "degree,ccdf".
    DegreeDist(DegreeDist),
    /// Run demand events and write a JSON run summary with CSV sidecars.
    Simulate(Simulate),
    /// Size CCDFs, Hill exponents, industry means and involvement.
    Analyze(Analyze),
    /// Leontief inverse of an input-output table.
    Leontief(Leontief),
    /// Correlate sector multipliers with simulated industry means.
    Compare(Compare),
}

#[derive(Debug, Args)]
pub struct NetOut {
    /// Edge-list output (SUPPLIER<TAB>CLIENT).
    #[arg(long)]
    pub out: PathBuf,
    /// Also label firms with equally weighted industries and write FIRM<TAB>INDUSTRY here.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Industry count used with --labels.
    #[arg(long, default_value_t = 19)]
    pub industries: usize,
}

#[derive(Debug, Args)]
pub struct GenRandom {
    #[arg(long)]
    pub nodes: usize,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub output: NetOut,
}

#[derive(Debug, Args)]
pub struct GenSf {
    #[arg(long)]
    pub nodes: usize,
    /// Links added per new firm.
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub output: NetOut,
}

#[derive(Debug, Args)]
pub struct NetIn {
    /// Edge-list file.
    #[arg(long)]
    pub net: Option<PathBuf>,
    /// Label file (FIRM<TAB>INDUSTRY).
    #[arg(long)]
    pub labels: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DegreeDist {
    #[arg(long)]
    pub net: PathBuf,
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long, default_value = "total")]
    pub kind: Degree,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct Simulate {
    #[command(flatten)]
    pub input: NetIn,
    /// key = value file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub events: Option<u64>,
    /// Warm-up events per replica, or "auto" for ten per firm.
    #[arg(long)]
    pub warmup: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// all | industry:CODE | firms:ID,ID,...
    #[arg(long)]
    pub source: Option<String>,
    /// zeros | uniform
    #[arg(long)]
    pub init: Option<String>,
    #[arg(long)]
    pub replicas: Option<u32>,
    /// full | aggregates
    #[arg(long)]
    pub record: Option<String>,
    /// Restore initial inventories after every event.
    #[arg(long)]
    pub reset_per_event: bool,
    /// Run summary JSON; sidecars go next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Analyze {
    /// Run summaries written by `simulate`.
    #[arg(long = "run", required = true, num_args = 1..)]
    pub runs: Vec<PathBuf>,
    /// Network the runs used; needed for involvement expectations.
    #[arg(long)]
    pub net: Option<PathBuf>,
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Lower threshold for the Hill exponent.
    #[arg(long, default_value_t = 10.0)]
    pub xmin: f64,
    /// Leave zero-size events out of industry means.
    #[arg(long)]
    pub exclude_zero: bool,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct Leontief {
    #[arg(long)]
    pub io: PathBuf,
    /// Inverse matrix CSV with the sector header.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-sector multipliers as "sector,multiplier".
    #[arg(long)]
    pub multipliers: Option<PathBuf>,
    #[arg(long, default_value = "column")]
    pub reduction: Reduction,
}

#[derive(Debug, Args)]
pub struct Compare {
    #[arg(long)]
    pub io: PathBuf,
    /// IO_SECTOR<TAB>INDUSTRY_CODE
    #[arg(long)]
    pub map: PathBuf,
    /// industry,mean,std,count
    #[arg(long)]
    pub means: PathBuf,
    #[arg(long, default_value = "column")]
    pub reduction: Reduction,
    /// Paired points as "industry,multiplier,mean".
    #[arg(long)]
    pub out: Option<PathBuf>,
}
