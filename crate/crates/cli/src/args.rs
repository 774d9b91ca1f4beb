use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "proxama", version, about = "AMA and Proximal AMA experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Total-variation deblurring of a blurred, noisy image.
    Tv(TvArgs),
    /// Kernel SVM training with the hinge loss.
    Svm(SvmArgs),
    /// Quadratic two-block problem from a JSON file, checked against the KKT solve.
    Qp(QpArgs),
    /// Operator, prox and solver self-checks.
    Check(CheckArgs),
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum AlgoChoice {
    Ama,
    ProxAma,
    Both,
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum TvChoice {
    Aniso,
    Iso,
    Both,
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// C = 1, sigma = 0.2, tau = 10
    Table1,
    /// C = 1, sigma = 0.25, tau = 102
    Table2,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone)]
pub struct TvArgs {
    /// Clean image to degrade (PGM P2/P5, or a CSV matrix).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Use the built-in synthetic test image instead of --input.
    #[arg(long)]
    pub synthetic: bool,
    /// Side length of the synthetic image.
    #[arg(long, default_value_t = 64)]
    pub size: usize,
    #[arg(long, value_enum, default_value_t = TvChoice::Both)]
    pub tv: TvChoice,
    #[arg(long, default_value_t = 5e-5)]
    pub lambda: f64,
    #[arg(long, value_enum, default_value_t = AlgoChoice::Both)]
    pub algo: AlgoChoice,
    #[arg(long, default_value_t = 1000)]
    pub iters: usize,
    /// Stepsize c (default 2 - 1e-7).
    #[arg(long)]
    pub stepsize: Option<f64>,
    /// sigma of the induced metric (default 1/(8.00001 c)).
    #[arg(long)]
    pub sigma_metric: Option<f64>,
    /// Standard deviation of the additive Gaussian noise.
    #[arg(long, default_value_t = 1e-3)]
    pub noise: f64,
    /// Stop once every KKT residual is at most this value.
    #[arg(long, default_value_t = 0.0)]
    pub tol: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, short, default_value = "out")]
    pub out: PathBuf,
    /// Also write SVG charts.
    #[arg(long)]
    pub plot: bool,
    /// JSON object whose keys override the flags above.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone)]
pub struct SvmArgs {
    /// Training data: CSV rows `features..., label` with labels +1/-1.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Test data in the same format.
    #[arg(long)]
    pub test_data: Option<PathBuf>,
    /// Use two seeded Gaussian blobs instead of --data.
    #[arg(long)]
    pub synthetic: bool,
    #[arg(long, default_value_t = 200)]
    pub train_size: usize,
    #[arg(long, default_value_t = 100)]
    pub test_size: usize,
    /// Loss weight C (default 1).
    #[arg(long = "C")]
    #[serde(rename = "C")]
    pub weight: Option<f64>,
    /// Gaussian kernel width (default 0.2).
    #[arg(long)]
    pub sigma: Option<f64>,
    /// M1 = tau K for Proximal AMA (default 10).
    #[arg(long)]
    pub tau: Option<f64>,
    /// Operating point; explicit --C/--sigma/--tau still win.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long, value_enum, default_value_t = AlgoChoice::Both)]
    pub algo: AlgoChoice,
    #[arg(long, default_value_t = 5000)]
    pub iters: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Iterations of the high-accuracy reference run used for RMSE.
    #[arg(long, default_value_t = 50_000)]
    pub reference_iters: usize,
    /// Stepsize c (default 2 lambda_min(K)/|K|^2 - 1e-8).
    #[arg(long)]
    pub stepsize: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, short, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub plot: bool,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone)]
pub struct QpArgs {
    /// JSON problem with P, q, Q, r, A, B, b and optional c, alpha, sigma.
    pub problem: PathBuf,
    #[arg(long, value_enum, default_value_t = AlgoChoice::ProxAma)]
    pub algo: AlgoChoice,
    /// Stepsize c (default: the file's `c`, else gamma/|A|^2).
    #[arg(long)]
    pub stepsize: Option<f64>,
    #[arg(long, default_value_t = 5000)]
    pub iters: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, short, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub plot: bool,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone)]
pub struct CheckArgs {
    /// Seed for the random test inputs.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl AlgoChoice {
    pub fn algorithms(self) -> Vec<proxama::solver::Algorithm> {
        use proxama::solver::Algorithm;
        match self {
            AlgoChoice::Ama => vec![Algorithm::Ama],
            AlgoChoice::ProxAma => vec![Algorithm::ProximalAma],
            AlgoChoice::Both => vec![Algorithm::ProximalAma, Algorithm::Ama],
        }
    }
}
