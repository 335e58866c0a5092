use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "regeval", version, about = "Deformable registration evaluation and ranking")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Units of displacement fields read or written.
    #[arg(long, global = true, value_enum, default_value_t = Units::Voxel)]
    pub units: Units,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for generators and the optimizer.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Units {
    Voxel,
    Mm,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate every job of a manifest and write one report per job.
    Eval(EvalArgs),
    /// Build the leaderboard from a directory of reports.
    Rank(RankArgs),
    /// Inverse-consistency residual of a forward/backward field pair.
    Ic(IcArgs),
    /// Per-method Pearson fit between two report metrics.
    Correlate(CorrelateArgs),
    /// Wall-clock timing of one manifest job, I/O included.
    Bench(BenchArgs),
    /// Write a synthetic cohort with ground-truth fields.
    Synth(SynthArgs),
    /// Register a moving image onto a fixed image.
    Register(RegisterArgs),
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub manifest: PathBuf,
    /// Labels to evaluate (default: all labels present in either map).
    #[arg(long, value_delimiter = ',')]
    pub labels: Option<Vec<u32>>,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    pub report_dir: PathBuf,
    /// Metrics to rank; ACC pools dsc, hd95 and tre among them.
    #[arg(long, value_delimiter = ',', default_value = "dsc,hd95,tre")]
    pub metrics: Vec<String>,
    #[arg(long, default_value_t = regeval::ranking::DEFAULT_ALPHA)]
    pub alpha: f64,
}

#[derive(Debug, Args)]
pub struct IcArgs {
    pub forward: PathBuf,
    pub backward: PathBuf,
    #[arg(long)]
    pub mask: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    pub report_dir: PathBuf,
    #[arg(long, default_value = "dsc")]
    pub x: String,
    #[arg(long, default_value = "tre")]
    pub y: String,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    pub manifest: PathBuf,
    /// Row of the manifest to time (0-based).
    #[arg(long, default_value_t = 0)]
    pub job: usize,
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,
    /// Load inputs once and time only the evaluation.
    #[arg(long)]
    pub in_memory: bool,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 16)]
    pub cases: usize,
    /// Edge length of the cubic grid.
    #[arg(long, default_value_t = 32)]
    pub size: usize,
    #[arg(long, default_value_t = 4)]
    pub label_count: usize,
    #[arg(long, default_value_t = 2.0)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 6.0)]
    pub smoothness: f64,
    #[arg(long, default_value_t = 0.02)]
    pub noise: f64,
}

#[derive(Debug, Args)]
pub struct RegisterArgs {
    pub fixed: PathBuf,
    pub moving: PathBuf,
    /// JSON configuration; unspecified keys take defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Use the SVF parameterization.
    #[arg(long)]
    pub svf: bool,
    /// Refine this field at full resolution instead of running the pyramid.
    #[arg(long)]
    pub init: Option<PathBuf>,
    /// Output field file name inside `--out`.
    #[arg(long, default_value = "field.nii.gz")]
    pub name: String,
}
