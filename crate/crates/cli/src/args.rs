use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hlx_core::experiments::{GrowthFamily, NormMode, DEFAULT_SLACK};
use hlx_core::normest::{MethodChoice, VERTEX_MAX_BITS};
use hlx_core::theory::DEFAULT_EPSILON;
use hlx_core::{ExtendedReal, Family, ScalarField};
use serde::Serialize;

/// Exponent phase diagram and norm experiments for m-linear forms on ℓ_p^n.
#[derive(Debug, Parser)]
#[command(name = "hlx", version, about)]
pub struct Cli {
    /// Base seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Emit a JSON run record instead of human-readable text.
    #[arg(long, global = true)]
    pub json: bool,

    /// Worker threads for parallel loops (default: all cores).
    #[arg(long, global = true, env = "HLX_THREADS")]
    pub threads: Option<usize>,

    /// Write the report to this file instead of standard output.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify (m, r, p) and report the optimal exponent of n.
    Exponent(ExponentArgs),
    /// Report the constants η, σ and the constant for a point.
    Constants(ConstantsArgs),
    /// Compute the operator norm of one form on the ℓ_p ball.
    Norm(NormArgs),
    /// Write a generated coefficient tensor to a file.
    Gen(GenArgs),
    /// Fit the growth exponent of a form family over n.
    Fit(FitArgs),
    /// Minimum sup-norm of random unimodular forms over n.
    Ksz(KszArgs),
    /// Check the coefficient inequality on a batch of instances.
    Certify(CertifyArgs),
    /// Draw the region map of the (p, r) plane as SVG.
    Phase(PhaseArgs),
}

#[derive(Debug, Clone, Copy, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutFormat {
    Json,
    Csv,
}

#[derive(Debug, Args, Serialize)]
pub struct PointArgs {
    /// Degree of the form.
    #[arg(short = 'm', long = "m")]
    pub m: u32,
    /// Coefficient exponent r ≥ 1.
    #[arg(short = 'r', long = "r")]
    pub r: f64,
    /// Lebesgue exponent p ≥ 1, or `inf`.
    #[arg(short = 'p', long = "p")]
    pub p: ExtendedReal,
    /// Scalar field.
    #[arg(long, default_value = "real")]
    pub field: ScalarField,
}

#[derive(Debug, Args, Serialize)]
pub struct ExponentArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub point: PointArgs,
    /// Slack added to the numerator of the PropB upper exponent.
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct ConstantsArgs {
    #[arg(short = 'm', long = "m")]
    pub m: u32,
    #[arg(short = 'r', long = "r", requires = "p")]
    pub r: Option<f64>,
    #[arg(short = 'p', long = "p", requires = "r")]
    pub p: Option<ExtendedReal>,
    #[arg(long, default_value = "real")]
    pub field: ScalarField,
}

#[derive(Debug, Args, Serialize)]
pub struct AscentArgs {
    /// Restarts of the alternating ascent.
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    /// Sweep cap per restart.
    #[arg(long, default_value_t = 500)]
    pub max_sweeps: usize,
    /// Relative improvement below which a restart stops.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Largest sign-vector enumeration, in bits, used for exact p = inf norms.
    #[arg(long, default_value_t = VERTEX_MAX_BITS)]
    pub vertex_max_bits: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct SourceArgs {
    /// Coefficient tensor file written by `gen`.
    #[arg(long, conflicts_with_all = ["family", "m", "n"])]
    pub tensor: Option<PathBuf>,
    /// Generated family.
    #[arg(long, requires_all = ["m", "n"])]
    pub family: Option<Family>,
    #[arg(short = 'm', long = "m")]
    pub m: Option<usize>,
    #[arg(short = 'n', long = "n")]
    pub n: Option<usize>,
    #[arg(long, default_value = "real")]
    pub field: ScalarField,
}

#[derive(Debug, Args, Serialize)]
pub struct NormArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    #[arg(short = 'p', long = "p")]
    pub p: ExtendedReal,
    /// auto, ascent, vertex, svd or diagonal.
    #[arg(long, default_value = "auto")]
    pub method: MethodChoice,
    #[command(flatten)]
    #[serde(flatten)]
    pub ascent: AscentArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct GenArgs {
    #[arg(long)]
    pub family: Family,
    #[arg(short = 'm', long = "m")]
    pub m: usize,
    #[arg(short = 'n', long = "n")]
    pub n: usize,
    #[arg(long, default_value = "real")]
    pub field: ScalarField,
}

#[derive(Debug, Args, Serialize)]
pub struct ExperimentOutput {
    /// Report format; csv prints one `n,value` row per point.
    #[arg(long = "out", value_enum)]
    pub out: Option<OutFormat>,
    /// Write a log-log SVG of the points and fitted line.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    /// diagonal, sign (minimum over samples) or gaussian (median).
    #[arg(long, default_value = "diagonal")]
    pub family: GrowthFamily,
    #[command(flatten)]
    #[serde(flatten)]
    pub point: PointArgs,
    /// Comma-separated dimensions.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n_list: Vec<usize>,
    /// exact or ascent.
    #[arg(long, default_value = "exact")]
    pub method: NormMode,
    /// Random draws per dimension.
    #[arg(long, default_value_t = 8)]
    pub samples: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub ascent: AscentArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub output: ExperimentOutput,
}

#[derive(Debug, Args, Serialize)]
pub struct KszArgs {
    #[arg(short = 'm', long = "m")]
    pub m: u32,
    #[arg(short = 'p', long = "p")]
    pub p: ExtendedReal,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n_list: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value = "real")]
    pub field: ScalarField,
    #[command(flatten)]
    #[serde(flatten)]
    pub ascent: AscentArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub output: ExperimentOutput,
}

#[derive(Debug, Args, Serialize)]
pub struct CertifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub point: PointArgs,
    /// Random family for generated instances.
    #[arg(long, default_value = "gaussian", conflicts_with = "tensor")]
    pub family: Family,
    /// Total instances; dimensions are cycled through.
    #[arg(long, default_value_t = 10)]
    pub instances: usize,
    /// Single dimension (shorthand for --n-list n).
    #[arg(short = 'n', long = "n", conflicts_with = "n_list")]
    pub n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    /// Certify these tensor files instead of generated instances.
    #[arg(long)]
    pub tensor: Vec<PathBuf>,
    /// Constant C; defaults to the known constant for the point.
    #[arg(long)]
    pub constant: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SLACK)]
    pub slack: f64,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub ascent: AscentArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub output: ExperimentOutput,
}

#[derive(Debug, Args, Serialize)]
pub struct PhaseArgs {
    #[arg(short = 'm', long = "m")]
    pub m: u32,
    #[arg(long, default_value_t = 6.0)]
    pub r_max: f64,
    #[arg(long, default_value_t = 12.0)]
    pub p_max: f64,
    #[arg(long, default_value_t = 120)]
    pub cells: usize,
    /// SVG destination.
    #[arg(long)]
    pub plot: PathBuf,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Exponent(_) => "exponent",
            Command::Constants(_) => "constants",
            Command::Norm(_) => "norm",
            Command::Gen(_) => "gen",
            Command::Fit(_) => "fit",
            Command::Ksz(_) => "ksz",
            Command::Certify(_) => "certify",
            Command::Phase(_) => "phase",
        }
    }
}
