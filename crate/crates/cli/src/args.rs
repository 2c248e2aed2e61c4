use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coreset_core::io::InputFormat;

#[derive(Debug, Parser)]
#[command(name = "coreset", version, about = "Layered group sampling coresets for (k,z)-clustering")]
pub struct Cli {
    /// Worker threads for the parallel stages.
    #[arg(long, global = true, env = "CORESET_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a coreset and write coreset.csv and meta.json.
    Build(BuildArgs),
    /// Measure a coreset's cost distortion over a family of solutions.
    Evaluate(EvaluateArgs),
    /// Compare sampling methods across coreset sizes and seeds.
    Bench(BenchArgs),
    /// Estimate the VC dimension of the metric ball range space.
    VcEstimate(VcArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Points,
    Matrix,
    Graph,
    Curves,
    Sets,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Points => "points",
            Format::Matrix => "matrix",
            Format::Graph => "graph",
            Format::Curves => "curves",
            Format::Sets => "sets",
        }
    }
}

impl From<Format> for InputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Points => InputFormat::Points,
            Format::Matrix => InputFormat::Matrix,
            Format::Graph => InputFormat::Graph,
            Format::Curves => InputFormat::Curves,
            Format::Sets => InputFormat::Sets,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Input file.
    #[arg(long, visible_alias = "points", value_name = "PATH")]
    pub input: PathBuf,

    #[arg(long, value_enum, default_value_t = Format::Points)]
    pub format: Format,

    /// One weight per line, overriding weights in the input.
    #[arg(long, value_name = "PATH")]
    pub weights: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    /// Number of centers.
    #[arg(long)]
    pub k: usize,

    /// Cost exponent: 1 for k-median, 2 for k-means.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=2))]
    pub z: u32,

    /// Target relative error in (0, 0.5).
    #[arg(long, default_value_t = 0.1, value_parser = parse_epsilon)]
    pub epsilon: f64,
}

#[derive(Debug, Clone, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub input: InputArgs,

    #[command(flatten)]
    pub problem: ProblemArgs,

    /// VC dimension bound of the metric's ball range space. Defaults to the
    /// published bound for Euclidean and Fréchet input; required otherwise.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub d_vc: Option<u64>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Constant in the recommended per-group sample count.
    #[arg(long, default_value_t = coreset_core::sampler::DEFAULT_C0)]
    pub c0: f64,

    /// Per-group sample count, overriding the recommended one.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub m: Option<u64>,

    /// Keep every sampled group whole instead of drawing from it.
    #[arg(long)]
    pub exact: bool,

    /// Directory for coreset.csv and meta.json.
    #[arg(long, default_value = ".", value_name = "DIR")]
    pub out_dir: PathBuf,

    /// Also write the point-to-group assignment as CSV.
    #[arg(long, value_name = "PATH")]
    pub dump_partition: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    Exhaustive,
    Random,
    Perturbed,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Coreset CSV written by `build`.
    #[arg(long, value_name = "PATH")]
    pub coreset: PathBuf,

    /// Metadata written by `build`; defaults to meta.json next to the coreset
    /// when that file exists.
    #[arg(long, value_name = "PATH")]
    pub meta: Option<PathBuf>,

    /// Number of centers; taken from the metadata when omitted.
    #[arg(long)]
    pub k: Option<usize>,

    /// Cost exponent; taken from the metadata when omitted.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=2))]
    pub z: Option<u32>,

    #[arg(long, value_enum, default_value_t = FamilyKind::Random)]
    pub family: FamilyKind,

    /// Solutions in a random or perturbed family.
    #[arg(long, default_value_t = 1000)]
    pub count: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Report JSON; printed to stdout when omitted.
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,

    /// Per-solution errors as CSV.
    #[arg(long, value_name = "PATH")]
    pub errors: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub input: InputArgs,

    #[command(flatten)]
    pub problem: ProblemArgs,

    /// Comma-separated methods among lgs, uniform, sensitivity.
    #[arg(long, value_delimiter = ',', default_value = "lgs,uniform,sensitivity")]
    pub methods: Vec<String>,

    /// Comma-separated target coreset sizes.
    #[arg(long, value_delimiter = ',', default_value = "100,200,400,800")]
    pub sizes: Vec<usize>,

    /// Comma-separated sampling seeds.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4")]
    pub seeds: Vec<u64>,

    /// Seed of the approximate solution and the solution family.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Random and perturbed solutions in the evaluation family, each.
    #[arg(long, default_value_t = 100)]
    pub count: usize,

    /// CSV output; printed to stdout when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VcArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Centers per ball union.
    #[arg(long, default_value_t = 1)]
    pub k_fold: usize,

    /// Largest subset size searched.
    #[arg(long, default_value_t = 8)]
    pub max_d: usize,

    /// Subsets per size before switching from exhaustive to random search.
    #[arg(long, default_value_t = 100_000)]
    pub budget: u64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Grid resolution of synthetic Euclidean centers; 0 keeps only
    /// in-sample centers. Defaults to a grid of at most 4096 centers for
    /// Euclidean input.
    #[arg(long)]
    pub grid: Option<usize>,

    /// JSON output; printed to stdout when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

fn parse_epsilon(s: &str) -> Result<f64, String> {
    let e: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if e > 0.0 && e < 0.5 {
        Ok(e)
    } else {
        Err(format!("{e} is not in (0, 0.5)"))
    }
}
