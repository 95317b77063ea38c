use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use nag_core::pv::DEFAULT_MAX_DEPTH;

#[derive(Debug, Clone, Parser)]
#[command(name = "nag", version, about = "Sup-norm numerical algebraic geometry toolkit")]
pub struct Cli {
    /// Worker threads; results do not depend on this value.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Grid point guard (overrides NAG_MAX_GRID).
    #[arg(long, global = true)]
    pub max_grid: Option<u64>,

    /// JSON result file (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Run manifest file; defaults to `<out>.manifest.json` when --out is given.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Certified sup-norm of a system on the sphere.
    Norm(NormArgs),
    /// Local condition numbers at points, and the global estimate.
    Condition(ConditionArgs),
    /// Betti numbers of the zero set on the sphere.
    Betti(BettiArgs),
    /// Interval subdivision of an affine curve or surface.
    Pv(PvArgs),
    /// One approximate zero by linear homotopy.
    Solve(SolveArgs),
    /// Random-ensemble experiments with their theoretical bounds.
    Experiment(ExperimentArgs),
    /// Re-run the command recorded in a manifest.
    Rerun(RerunArgs),
    /// Print the bundled manifest JSON schema.
    Schema,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Norm(_) => "norm",
            Command::Condition(_) => "condition",
            Command::Betti(_) => "betti",
            Command::Pv(_) => "pv",
            Command::Solve(_) => "solve",
            Command::Experiment(_) => "experiment",
            Command::Rerun(_) => "rerun",
            Command::Schema => "schema",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct NormArgs {
    #[arg(long)]
    pub poly: PathBuf,
    /// Accuracy exponent: lower ≥ (1 − 2^{-k})·upper.
    #[arg(long, default_value_t = 7)]
    pub k: u32,
    /// Complex sup-norm of a real system.
    #[arg(long)]
    pub complex: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ConditionArgs {
    #[arg(long)]
    pub poly: PathBuf,
    /// Query point as comma-separated coordinates (re,im interleaved for complex systems); repeatable.
    #[arg(long, allow_hyphen_values = true)]
    pub point: Vec<String>,
    /// CSV of query points, one per row, with a header.
    #[arg(long)]
    pub points: Option<PathBuf>,
    /// Also run the global grid estimate K̂.
    #[arg(long)]
    pub global: bool,
    /// Norm accuracy exponent; defaults to 7 for real systems and 3 for complex ones, whose
    /// nets live on S^{2n+1}.
    #[arg(long)]
    pub k: Option<u32>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BettiArgs {
    #[arg(long)]
    pub poly: PathBuf,
    /// Grid level and ball radius, accepted only inside the verified radius window.
    #[arg(long, num_args = 2, value_names = ["LEVEL", "EPSILON"])]
    pub relaxed: Option<Vec<String>>,
    /// CSV of the selected cloud.
    #[arg(long)]
    pub dump_cloud: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PvArgs {
    /// Single homogeneous equation; X_0 = 1 gives the affine polynomial.
    #[arg(long)]
    pub poly: PathBuf,
    /// Half-width of the root box [-a, a]^n.
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 7)]
    pub knorm: u32,
    #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
    pub max_depth: u32,
    /// CSV of accepted boxes.
    #[arg(long)]
    pub boxes: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FastPathArg {
    Auto,
    On,
    Off,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SolveArgs {
    #[arg(long)]
    pub poly: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = FastPathArg::Auto)]
    pub quadratic_fastpath: FastPathArg,
    /// CSV of homotopy steps.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, default_value_t = nag_core::homotopy::DEFAULT_MAX_STEPS)]
    pub max_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Ratio,
    Tail,
    CondRatio,
    PvCount,
    HomotopySteps,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ExperimentArgs {
    #[arg(long, value_enum)]
    pub kind: ExperimentKind,
    #[arg(long)]
    pub n: usize,
    /// Degrees, comma-separated; a single value is repeated for every component.
    #[arg(long, value_delimiter = ',', required = true)]
    pub d: Vec<u32>,
    /// Number of components when a single degree is given (default n).
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long, default_value = "kss-real")]
    pub law: String,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Tail thresholds, comma-separated (tail experiment).
    #[arg(long, value_delimiter = ',')]
    pub thresholds: Vec<f64>,
    /// Root box half-width (pv-count experiment).
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, value_enum, default_value_t = FastPathArg::On)]
    pub quadratic_fastpath: FastPathArg,
    /// CSV with one row per trial.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct RerunArgs {
    pub manifest: PathBuf,
}
