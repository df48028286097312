use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ctoa_core::config::parse_gamma;

#[derive(Debug, Parser)]
#[command(
    name = "ctoa",
    version,
    about = "Confined time-of-arrival spectra and dynamics"
)]
pub struct Cli {
    #[command(flatten)]
    pub system: SystemArgs,

    #[command(subcommand)]
    pub command: Command,
}

/// Parameters shared by every command. Command-line values override the
/// config file, which overrides the defaults.
#[derive(Debug, Args)]
pub struct SystemArgs {
    /// Config file with `key = value` lines.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[arg(long, global = true)]
    pub length: Option<f64>,

    #[arg(long, global = true)]
    pub mass: Option<f64>,

    #[arg(long, global = true)]
    pub hbar: Option<f64>,

    /// Momentum modes kept per side.
    #[arg(long, global = true)]
    pub basis_cutoff: Option<usize>,

    /// Gauss-Legendre nodes on the box.
    #[arg(long, global = true)]
    pub grid_points: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Roots of the characteristic equation and the matching eigenvalues.
    Roots(RootsArgs),
    /// Analytic levels with family and parity tags.
    Spectrum(SpectrumArgs),
    /// Normalized closed-form eigenfunction samples.
    Eigenfunction(EigenfunctionArgs),
    /// Time series of moments for an evolving eigenfunction.
    Evolve(EvolveArgs),
    /// Data behind one of the reference figures.
    Figure(FigureArgs),
    /// Run the verification suites and write the report.
    Verify(VerifyArgs),
}

fn gamma_arg(s: &str) -> Result<f64, String> {
    parse_gamma(s).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RootCase {
    Even,
    Odd,
    Merged,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    #[value(name = "1a")]
    Fig1a,
    #[value(name = "1b")]
    Fig1b,
    #[value(name = "2a")]
    Fig2a,
    #[value(name = "2b")]
    Fig2b,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    All,
    Spectral,
    Dynamics,
    Commutator,
}

#[derive(Debug, Args)]
pub struct RootsArgs {
    /// Boundary phase: a decimal, `0` or `pi/2`.
    #[arg(long, value_parser = gamma_arg, allow_hyphen_values = true)]
    pub gamma: f64,

    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=10_000))]
    pub count: u32,

    /// Single family at the parity phases, or both merged.
    #[arg(long, value_enum, default_value_t = RootCase::Merged)]
    pub case: RootCase,

    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long, value_parser = gamma_arg, allow_hyphen_values = true)]
    pub gamma: f64,

    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=10_000))]
    pub count: u32,

    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EigenfunctionArgs {
    #[arg(long, value_parser = gamma_arg, allow_hyphen_values = true)]
    pub gamma: f64,

    /// Quantum number, from 1.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=10_000))]
    pub n: u32,

    #[arg(long, value_enum, default_value_t = BranchArg::Plus)]
    pub branch: BranchArg,

    /// Sample nodes; overrides the configured grid.
    #[arg(long)]
    pub grid: Option<usize>,

    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[arg(long, value_parser = gamma_arg, allow_hyphen_values = true)]
    pub gamma: f64,

    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=10_000))]
    pub n: u32,

    #[arg(long, value_enum, default_value_t = BranchArg::Plus)]
    pub branch: BranchArg,

    /// End of the window; defaults to twice the eigenvalue.
    #[arg(long)]
    pub t_max: Option<f64>,

    #[arg(long, default_value_t = 400)]
    pub steps: usize,

    /// Also write densities over (t, q) to this file.
    #[arg(long, value_name = "PATH")]
    pub snapshots: Option<PathBuf>,

    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[arg(long, value_enum)]
    pub id: FigureId,

    /// Directory that receives the CSV files.
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    pub suite: SuiteArg,

    /// Report file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Record the wall-clock time in the report. Off by default so repeated
    /// runs are byte-identical.
    #[arg(long)]
    pub timestamp: bool,
}
