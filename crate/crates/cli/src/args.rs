use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nabfs_core::{FeaturesPerSplit, LearnerSpec, NabfsConfig};

#[derive(Debug, Parser)]
#[command(name = "nabfs", version, about = "Noise-augmented bootstrap feature selection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Select features from a CSV file.
    Select(SelectArgs),
    /// Naive single-fit threshold selection on a CSV file, for comparison.
    Baseline(SelectArgs),
    /// Monte Carlo power / type I error / Jaccard over a grid of designs.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaskArg {
    Auto,
    Classify,
    Regress,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LearnerArg {
    Logistic,
    Linear,
    Forest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Power,
    Type1,
    Jaccard,
}

#[derive(Debug, Args)]
pub struct NabfsArgs {
    #[arg(long, value_enum, default_value = "logistic")]
    pub learner: LearnerArg,
    /// Number of Gaussian noise probes appended to the design.
    #[arg(long, default_value_t = 3)]
    pub noise_count: usize,
    #[arg(long, default_value_t = 100)]
    pub bootstraps: usize,
    /// Family-wise significance level for the Holm step-down.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.1)]
    pub noise_sd: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to one per core. Never changes results.
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    pub workers: Option<u16>,
    /// Ridge penalty for the logistic and linear learners.
    #[arg(long, default_value_t = 1.0)]
    pub l2_penalty: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 100)]
    pub trees: usize,
    #[arg(long, default_value_t = 6)]
    pub max_depth: usize,
    #[arg(long, default_value_t = 5)]
    pub min_leaf: usize,
    /// Columns tried per split: `sqrt` or a fraction in (0, 1].
    #[arg(long, default_value = "sqrt", value_parser = parse_features_per_split)]
    pub features_per_split: FeaturesPerSplit,
}

fn parse_features_per_split(s: &str) -> Result<FeaturesPerSplit, String> {
    if s.eq_ignore_ascii_case("sqrt") {
        return Ok(FeaturesPerSplit::Sqrt);
    }
    match s.parse::<f64>() {
        Ok(f) if f > 0.0 && f <= 1.0 => Ok(FeaturesPerSplit::Fraction(f)),
        _ => Err(format!("expected `sqrt` or a fraction in (0, 1], got `{s}`")),
    }
}

impl NabfsArgs {
    pub fn learner_spec(&self) -> LearnerSpec {
        let tol = 1e-8;
        match self.learner {
            LearnerArg::Logistic => LearnerSpec::Logistic { l2_penalty: self.l2_penalty, max_iter: self.max_iter, tol },
            LearnerArg::Linear => LearnerSpec::Linear { l2_penalty: self.l2_penalty, max_iter: self.max_iter, tol },
            LearnerArg::Forest => LearnerSpec::Forest {
                n_trees: self.trees,
                max_depth: self.max_depth,
                min_leaf: self.min_leaf,
                features_per_split: self.features_per_split,
            },
        }
    }

    pub fn config(&self) -> NabfsConfig {
        NabfsConfig {
            noise_count: self.noise_count,
            bootstrap_count: self.bootstraps,
            alpha: self.alpha,
            noise_sd: self.noise_sd,
            learner: self.learner_spec(),
            seed: self.seed,
            ..NabfsConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Name of the response column.
    #[arg(long)]
    pub target: String,
    #[arg(long, value_enum, default_value = "auto")]
    pub task: TaskArg,
    /// Field delimiter of the input file.
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    /// Write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Store wall-clock time in the report (makes it non-reproducible).
    #[arg(long)]
    pub record_timing: bool,
    #[command(flatten)]
    pub nabfs: NabfsArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Sample sizes (comma-separated).
    #[arg(long, value_delimiter = ',', default_value = "1000")]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    pub p: usize,
    /// Number of signal features; the first `k` columns.
    #[arg(long, default_value_t = 20)]
    pub k: usize,
    /// Equicorrelation levels (comma-separated).
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub rho: Vec<f64>,
    /// Noise probe counts (comma-separated); defaults to --noise-count.
    #[arg(long, value_delimiter = ',')]
    pub l: Option<Vec<usize>>,
    /// Monte Carlo replicates per cell.
    #[arg(long, default_value_t = 30)]
    pub reps: usize,
    /// Use the reference grid: n in {500, 1000, 3000}, 12 rho levels, l = 1..7.
    #[arg(long, conflicts_with_all = ["n", "rho", "l"])]
    pub reference_grid: bool,
    /// Draw coefficients once per master seed instead of once per replicate.
    #[arg(long)]
    pub fixed_beta: bool,
    /// Write the JSON results document here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the flat metric table (CSV) here.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Write an SVG line chart of a metric against rho, one line per (n, l).
    #[arg(long)]
    pub chart: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "power")]
    pub chart_metric: MetricArg,
    #[command(flatten)]
    pub nabfs: NabfsArgs,
}
