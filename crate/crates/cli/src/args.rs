use std::path::PathBuf;

use capacitary_core::functionals::{DEFAULT_SAMPLE_COUNT, DEFAULT_SEED};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Capacitary potentials, boundary functionals and symmetry diagnostics.
#[derive(Debug, Parser)]
#[command(name = "capacitary", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the equilibrium density and report the capacity three ways.
    Capacity(SolveArgs),
    /// Full pipeline: solve, boundary functionals, lower bound, Newton scan, verdict.
    Verify(VerifyArgs),
    /// Finite-difference verification of the divergence identities.
    IdentityCheck(IdentityArgs),
    /// Refinement study over a range of icosphere levels.
    Convergence(ConvergenceArgs),
    /// Closed-form values for shapes with an analytic solution.
    Oracle(OracleArgs),
    /// Write a built-in shape as an OFF file.
    Export(ExportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Closed triangulated surface in OFF format.
    #[arg(
        long,
        value_name = "PATH",
        conflicts_with = "shape",
        required_unless_present = "shape"
    )]
    pub mesh: Option<PathBuf>,
    /// Built-in shape: `sphere R L`, `ellipsoid A B C L` or `bumpy R EPS L`.
    #[arg(long, value_name = "SPEC", num_args = 1.., allow_negative_numbers = true)]
    pub shape: Option<Vec<String>>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long, short, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Points per panel of the far-field rule (1, 3, 6 or 12).
    #[arg(long, default_value_t = 6)]
    pub quad_order: usize,
    /// Radius of the far sphere, in mesh diameters.
    #[arg(long, default_value_t = 20.0)]
    pub far_radius: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub solve: SolveArgs,
    /// Threshold on F1 relative to the sum of area·|Du|³.
    #[arg(long)]
    pub tol_f1: Option<f64>,
    /// Threshold on the relative F2 gap.
    #[arg(long)]
    pub tol_f2: Option<f64>,
    /// Threshold on the normalized Newton deficit.
    #[arg(long)]
    pub tol_newton: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Exterior sample points of the Newton scan.
    #[arg(long, default_value_t = DEFAULT_SAMPLE_COUNT)]
    pub samples: usize,
}

#[derive(Debug, Clone, Args)]
pub struct IdentityArgs {
    /// Dimensions to check.
    #[arg(long, value_delimiter = ',', default_values_t = [3usize, 4, 5, 6])]
    pub dims: Vec<usize>,
    /// Random points per test function.
    #[arg(long, default_value_t = 10)]
    pub points: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Corrupt one identity (`div-free`, `a`, `b` or `c`).
    #[arg(long, hide = true, value_name = "IDENTITY")]
    pub inject_fault: Option<String>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Levels as `LO-HI` or a comma list; defaults to 2 up to the level in the shape spec (or 4).
    #[arg(long)]
    pub levels: Option<String>,
    #[arg(long, default_value_t = 6)]
    pub quad_order: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_SAMPLE_COUNT)]
    pub samples: usize,
    /// Report zero wall time so that output is byte-reproducible.
    #[arg(long)]
    pub no_timing: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    /// `sphere R` or `ellipsoid A B C`.
    #[arg(long, value_name = "SPEC", num_args = 1.., required = true, allow_negative_numbers = true)]
    pub shape: Vec<String>,
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ExportArgs {
    #[arg(long, value_name = "SPEC", num_args = 1.., required = true, allow_negative_numbers = true)]
    pub shape: Vec<String>,
    #[arg(long, short, value_name = "PATH", required = true)]
    pub output: PathBuf,
}
