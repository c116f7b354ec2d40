//! `crystal-zeta`: lattices, zeta functions, laws and walks from the command
//! line.
//!
//! Exit status: 0 on success, 1 when a verification fails, 2 on usage or
//! configuration errors.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Format;

#[derive(Debug, Parser)]
#[command(name = "crystal-zeta", version, about = "Crystal lattices, zeta functions and the random walks they generate")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads for simulation (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Built-in models.
    #[command(subcommand)]
    Preset(PresetCmd),
    /// Structure of a lattice.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Zeta function values.
    #[command(subcommand)]
    Zeta(ZetaCmd),
    /// Probability laws: pmf tables, characteristic functions, Levy atoms.
    #[command(subcommand)]
    Dist(DistCmd),
    /// Random walks.
    #[command(subcommand)]
    Walk(WalkCmd),
    /// Statistical checks of samplers against analytic results.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Debug, Subcommand)]
pub enum PresetCmd {
    /// List the built-in models.
    List,
    /// Print the JSON config of a built-in model.
    Show {
        name: String,
        /// N for the triangular kernel.
        #[arg(long = "n")]
        n: Option<u32>,
    },
}

#[derive(Debug, Subcommand)]
pub enum LatticeCmd {
    /// Vertex and edge counts, Betti number, dimension, maximality.
    Info(ModelArgs),
    /// Non-degeneracy of the realization; exits 1 on violations.
    Check(ModelArgs),
}

#[derive(Debug, Subcommand)]
pub enum ZetaCmd {
    /// Evaluate a zeta function at a complex vector.
    Eval(ZetaArgs),
}

#[derive(Debug, Subcommand)]
pub enum DistCmd {
    /// Support points and masses.
    Table(LawArgs),
    /// Characteristic function on a grid.
    Cf(CfArgs),
    /// Levy atoms of the compound Poisson law.
    Levy(LawArgs),
}

#[derive(Debug, Subcommand)]
pub enum WalkCmd {
    /// One CSV row per (path, step).
    Simulate(WalkArgs),
    /// Analytic and empirical characteristic function of the n-step displacement.
    Cf(WalkCfArgs),
}

#[derive(Debug, Subcommand)]
pub enum VerifyCmd {
    /// Empirical vs analytic CF of the walk displacement; exits 1 above c/sqrt(N).
    Cf(VerifyCfArgs),
    /// Chi-square test of compound Poisson draws against the convolution oracle.
    Sampler(SamplerArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Built-in model: line, square, triangular, hexagonal.
    #[arg(long, conflicts_with = "config")]
    pub preset: Option<String>,
    /// JSON model file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// N for the triangular kernel (default 3).
    #[arg(long = "n")]
    pub n: Option<u32>,
    /// Triangular kernel weights, in the order of `preset show triangular`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ZetaFunction {
    /// The model's finite Euler product.
    Euler,
    /// The Riemann zeta function (one complex argument).
    Riemann,
    /// alpha e^{s - sigma} + beta e^{sigma - s} as a Shintani series on the line.
    LineTwoPoint,
    /// exp(rate e^{s - sigma}) as a Shintani series on the line.
    LinePoisson,
}

#[derive(Debug, Clone, Args)]
pub struct ZetaArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value_t = ZetaFunction::Euler)]
    pub function: ZetaFunction,
    /// Argument components, e.g. `--s 2+1i --s 1.5`.
    #[arg(long = "s", required = true, allow_hyphen_values = true)]
    pub s: Vec<String>,
    /// Also sum the Euler product as a series truncated at this order.
    #[arg(long)]
    pub series: Option<usize>,
    /// alpha, beta of the two-point series.
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.5])]
    pub weights2: Vec<f64>,
    /// sigma of the line series.
    #[arg(long, default_value_t = 2.0)]
    pub line_sigma: f64,
    /// Rate of the Poisson series.
    #[arg(long, default_value_t = 1.0)]
    pub rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LawKind {
    /// Finite-range kernel at a base vertex.
    Kernel,
    /// Compound Poisson law of the finite Euler product.
    Euler,
    /// Riemann zeta distribution on -log n.
    Riemann,
}

#[derive(Debug, Clone, Args)]
pub struct LawArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value_t = LawKind::Euler)]
    pub law: LawKind,
    /// Base vertex of the kernel (default: first vertex).
    #[arg(long)]
    pub vertex: Option<String>,
    /// Normalization point, overriding the model.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub sigma: Option<Vec<f64>>,
    /// Euler coefficients, overriding the model.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alpha: Option<Vec<f64>>,
    /// Box radius for the compound Poisson pmf.
    #[arg(long, default_value_t = 20.0)]
    pub radius: f64,
    /// Largest n of the Riemann zeta distribution.
    #[arg(long, default_value_t = 1000)]
    pub n_max: u64,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Grid points per axis.
    #[arg(long, default_value_t = 5)]
    pub grid_points: usize,
    /// Grid covers [-r, r]^d.
    #[arg(long, default_value_t = 2.0)]
    pub grid_radius: f64,
}

#[derive(Debug, Clone, Args)]
pub struct CfArgs {
    #[command(flatten)]
    pub law: LawArgs,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Args)]
pub struct WalkArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    #[arg(long, default_value_t = 1)]
    pub paths: usize,
    /// Master seed; path i uses stream i.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Use the compound Poisson (infinite-range) walk instead of the kernels.
    #[arg(long)]
    pub infinite: bool,
}

#[derive(Debug, Clone, Args)]
pub struct WalkCfArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Threshold constant c in c/sqrt(N).
    #[arg(long, default_value_t = 4.0)]
    pub c: f64,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyCfArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 1)]
    pub steps: usize,
    #[arg(long, default_value_t = 100_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub infinite: bool,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 4.0)]
    pub c: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SamplerArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 100_000)]
    pub draws: usize,
    #[arg(long, default_value_t = 12.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fail when the p-value is at or below this level.
    #[arg(long, default_value_t = 1e-3)]
    pub level: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(&cli) {
        Ok(commands::Status::Ok) => ExitCode::SUCCESS,
        Ok(commands::Status::VerificationFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
