//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

/// Simulator for the linear-optics Gaussian cloning machine.
#[derive(Debug, Parser)]
#[command(name = "linclone", version, args_override_self = true)]
pub struct Cli {
    /// File of `key=value` lines supplying defaults for the subcommand's flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Write the report or table here instead of the default location.
    #[arg(long, short, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Directory for files written without an explicit `--output`.
    #[arg(long, global = true, env = "LINCLONE_OUT_DIR", value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Record wall-clock time in reports.
    #[arg(long, global = true)]
    pub timing: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    /// Subcommand.
    #[command(subcommand)]
    pub command: Command,
}

/// Subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Clones one Gaussian state and reports both clones.
    #[command(args_override_self = true)]
    Clone(CloneArgs),
    /// Tabulates clone fidelity along one parameter for several efficiencies.
    #[command(args_override_self = true)]
    Sweep(SweepArgs),
    /// Averages the clone fidelity over an ensemble of inputs.
    #[command(args_override_self = true)]
    Average(AverageArgs),
    /// Finds the feed-forward gain maximizing the amplitude-averaged fidelity.
    #[command(name = "optimize-gain", args_override_self = true)]
    OptimizeGain(OptimizeGainArgs),
    /// Samples measurement trajectories and compares with the analytic clones.
    #[command(args_override_self = true)]
    Mc(McArgs),
    /// Runs the numerical cross-check suite.
    #[command(args_override_self = true)]
    Verify(VerifyArgs),
}

/// Covariance propagation rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PropMode {
    /// Quadratic in the gain.
    Physical,
    /// Linear in the gain, as printed.
    Paper,
}

impl From<PropMode> for linclone_core::Propagation {
    fn from(p: PropMode) -> Self {
        match p {
            PropMode::Physical => Self::Physical,
            PropMode::Paper => Self::PaperLinearG,
        }
    }
}

/// Operating point of the cloner.
#[derive(Debug, Clone, Args)]
pub struct ClonerArgs {
    /// First beam-splitter transmissivity.
    #[arg(long, default_value_t = 0.5)]
    pub tau1: f64,
    /// Second beam-splitter transmissivity.
    #[arg(long, default_value_t = 0.5)]
    pub tau2: f64,
    /// Feed-forward gain (default: unity gain for `--tau1`).
    #[arg(long)]
    pub g: Option<f64>,
    /// Homodyne quantum efficiency.
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    /// Covariance propagation rule.
    #[arg(long, value_enum, default_value_t = PropMode::Physical)]
    pub prop: PropMode,
}

/// Input state.
#[derive(Debug, Clone, Args)]
#[group(id = "state", required = true, multiple = false)]
pub struct StateKind {
    /// Vacuum.
    #[arg(long)]
    pub vacuum: bool,
    /// Coherent state with amplitude `α`, e.g. `1+0.5i`.
    #[arg(long, value_name = "ALPHA", allow_hyphen_values = true)]
    pub coherent: Option<Complex64>,
    /// Squeezed state with squeezing modulus `|ξ|`.
    #[arg(long, value_name = "R")]
    pub squeezed: Option<f64>,
    /// Thermal state with mean photon number `N`.
    #[arg(long, value_name = "N")]
    pub thermal: Option<f64>,
}

/// Input state with its optional extras.
#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    /// State family and main parameter.
    #[command(flatten)]
    pub kind: StateKind,
    /// Squeezing phase `arg ξ`.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub squeeze_phase: f64,
    /// Displacement applied to squeezed and thermal states.
    #[arg(long, value_name = "ALPHA", allow_hyphen_values = true)]
    pub alpha: Option<Complex64>,
}

/// `clone` flags.
#[derive(Debug, Clone, Args)]
pub struct CloneArgs {
    /// Input.
    #[command(flatten)]
    pub state: StateArgs,
    /// Cloner.
    #[command(flatten)]
    pub cloner: ClonerArgs,
}

/// Swept parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    /// First transmissivity at unity gain, coherent input.
    #[value(name = "tau1")]
    Tau1,
    /// Squeezing modulus of a squeezed input.
    #[value(name = "xi")]
    Xi,
    /// Width of the Gaussian squeezing ensemble.
    #[value(name = "sigma_s")]
    SigmaS,
    /// Thermal photon number of a thermal input.
    #[value(name = "N")]
    N,
    /// Upper bound of the top-hat thermal ensemble.
    #[value(name = "bigN")]
    BigN,
    /// Width of the half-Gaussian thermal ensemble.
    #[value(name = "mu_N")]
    MuN,
}

impl Quantity {
    /// CSV column name of the abscissa.
    pub fn column(self) -> &'static str {
        match self {
            Self::Tau1 => "tau1",
            Self::Xi => "xi",
            Self::SigmaS => "sigma_s",
            Self::N => "N",
            Self::BigN => "bigN",
            Self::MuN => "mu_N",
        }
    }
}

/// Radial weight of the squeezing ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightMode {
    /// Marginal of the complex Gaussian prior.
    Prior,
    /// Printed radial integrand, renormalized.
    Printed,
}

impl From<WeightMode> for linclone_core::ensemble::SqueezingWeight {
    fn from(w: WeightMode) -> Self {
        match w {
            WeightMode::Prior => Self::Prior,
            WeightMode::Printed => Self::Printed,
        }
    }
}

/// `sweep` flags.
#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Parameter on the abscissa.
    #[arg(long, value_enum)]
    pub quantity: Quantity,
    /// First abscissa.
    #[arg(long)]
    pub lo: f64,
    /// Last abscissa.
    #[arg(long)]
    pub hi: f64,
    /// Number of points, ends included.
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
    /// Efficiencies, one column each.
    #[arg(long, value_delimiter = ',', action = clap::ArgAction::Set, default_values_t = [1.0, 0.75, 0.5])]
    pub eta: Vec<f64>,
    /// Covariance propagation rule.
    #[arg(long, value_enum, default_value_t = PropMode::Physical)]
    pub prop: PropMode,
    /// Emit one column per efficiency and propagation rule.
    #[arg(long)]
    pub both_modes: bool,
    /// Radial weight for `sigma_s` sweeps.
    #[arg(long, value_enum, default_value_t = WeightMode::Prior)]
    pub squeezing_weight: WeightMode,
}

/// Ensemble family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnsembleKind {
    /// Gaussian amplitude prior, width `σ_a²`.
    Amplitude,
    /// Gaussian squeezing prior, width `σ_s`.
    Squeezing,
    /// Thermal photon number uniform on `[0, 𝒩]`.
    Tophat,
    /// Half-Gaussian thermal photon number, width `μ_N`.
    Halfgauss,
}

/// `average` flags.
#[derive(Debug, Clone, Args)]
pub struct AverageArgs {
    /// Ensemble family.
    #[arg(long, value_enum)]
    pub ensemble: EnsembleKind,
    /// Width parameter of the ensemble.
    #[arg(long)]
    pub width: f64,
    /// Radial weight for the squeezing ensemble.
    #[arg(long, value_enum, default_value_t = WeightMode::Prior)]
    pub squeezing_weight: WeightMode,
    /// Cloner.
    #[command(flatten)]
    pub cloner: ClonerArgs,
}

/// `optimize-gain` flags.
#[derive(Debug, Clone, Args)]
pub struct OptimizeGainArgs {
    /// Amplitude prior width `σ_a²`.
    #[arg(long)]
    pub sigma_a2: f64,
    /// Homodyne quantum efficiency.
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    /// Covariance propagation rule.
    #[arg(long, value_enum, default_value_t = PropMode::Physical)]
    pub prop: PropMode,
    /// Hold the first transmissivity fixed instead of optimizing it.
    #[arg(long)]
    pub tau1: Option<f64>,
}

/// `mc` flags.
#[derive(Debug, Clone, Args)]
pub struct McArgs {
    /// Input.
    #[command(flatten)]
    pub state: StateArgs,
    /// Cloner.
    #[command(flatten)]
    pub cloner: ClonerArgs,
    /// Number of trajectories.
    #[arg(long, default_value_t = 100_000)]
    pub n: u64,
    /// Base seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Depth of the check suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Level {
    /// Closed forms, identities and a few oracle comparisons.
    Quick,
    /// Everything, including the Fock-space channel.
    Full,
}

/// `verify` flags.
#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Depth of the suite.
    #[arg(long, value_enum, default_value_t = Level::Quick)]
    pub level: Level,
    /// Seed for the randomized checks.
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
}
