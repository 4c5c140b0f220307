//! Command-line front end.
//!
//! Exit codes: 0 on success (including a geodesic stopped at the boundary),
//! 2 for invalid input, 3 for numerical failures, 64 for usage errors.

mod commands;
pub mod io;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug)]
pub enum CliError {
    Lib(Error),
    Input(String),
    Numerical(String),
    Internal(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(e) if e.is_numerical() => EXIT_NUMERICAL,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Internal(_) => EXIT_NUMERICAL,
            _ => EXIT_INVALID,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Input(s) => write!(f, "invalid input: {s}"),
            CliError::Numerical(s) => write!(f, "numerical failure: {s}"),
            CliError::Internal(s) => write!(f, "internal error: {s}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "flagfold", version, about = "Weighted flags, pinched geodesics and flagfold diagnostics")]
pub struct Cli {
    /// Seed for randomized subroutines (required by random demos).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Write the main output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Shoot a geodesic of the pinched metric and print the sampled states.
    Geodesic(GeodesicArgs),
    /// Decompose a trace-one PSD matrix into weights and frame.
    Decompose(DecomposeArgs),
    /// Distance between two weighted flags or two subspaces.
    Distance(DistanceArgs),
    /// Local covariance flagfold of a point cloud.
    Pca(PcaArgs),
    /// First variation of a flagfold along a built-in vector field.
    Firstvar(FirstvarArgs),
    /// Monotonicity ratios of a flagfold around a point.
    Monotonicity(MonotonicityArgs),
    /// Decomposed straight segment between two matrices.
    EuclidGeodesic(EuclidArgs),
}

#[derive(Debug, Args)]
struct GeodesicArgs {
    /// JSON config {n, mu0, mu_dot0, U0, B0, h, N, mu_min, pinch, convention, singular_tol}.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    mu0: Option<Vec<f64>>,
    #[arg(long = "mu-dot0", value_delimiter = ',', allow_hyphen_values = true)]
    mu_dot0: Option<Vec<f64>>,
    /// Initial frame, row-major.
    #[arg(long = "u0", value_delimiter = ',', allow_hyphen_values = true)]
    u0: Option<Vec<f64>>,
    /// Strict upper triangle of B(0), row-major: b12, b13, ..., b23, ...
    #[arg(long = "b0", value_delimiter = ',', allow_hyphen_values = true)]
    b0: Option<Vec<f64>>,
    #[arg(long)]
    h: Option<f64>,
    /// Maximum number of steps.
    #[arg(long = "steps")]
    steps: Option<usize>,
    #[arg(long = "mu-min")]
    mu_min: Option<f64>,
    #[arg(long = "singular-tol")]
    singular_tol: Option<f64>,
    /// Pinch function: quarter-norm or norm.
    #[arg(long)]
    pinch: Option<String>,
    /// Off-diagonal convention: frobenius (default here) or single.
    #[arg(long)]
    convention: Option<String>,
    /// Also write the ellipsoid of every state (n = 3) as JSON.
    #[arg(long)]
    ellipsoids: Option<PathBuf>,
    /// Keep every k-th state in the output.
    #[arg(long, default_value_t = 1)]
    every: usize,
}

#[derive(Debug, Args)]
struct DecomposeArgs {
    /// Matrix JSON inline, file path, or '-' for stdin.
    matrix: String,
    #[arg(long = "zero-tol")]
    zero_tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DistanceKind {
    Euclidean,
    Krakus,
    Conic,
    Grassmann,
}

#[derive(Debug, Args)]
struct DistanceArgs {
    #[arg(long, value_enum)]
    kind: DistanceKind,
    /// First operand: matrix JSON, or {mu, frame} for flag distances, or an
    /// orthonormal n×d basis for grassmann. Inline, path, or '-'.
    a: String,
    b: String,
    /// Divide the Grassmann distance by √d.
    #[arg(long)]
    normalized: bool,
}

#[derive(Debug, Args)]
struct PcaArgs {
    /// Point CSV with columns x_1..x_n and optional mass.
    #[arg(long, conflicts_with = "demo")]
    input: Option<String>,
    /// Generated point cloud instead of a file.
    #[arg(long, value_enum)]
    demo: Option<Demo>,
    #[arg(long)]
    eta: f64,
    #[arg(long, default_value = "indicator")]
    kernel: String,
    /// Sample count for random demos, cells per side for grids.
    #[arg(long, default_value_t = 1000)]
    count: usize,
    /// Demo radius (cylinder, sphere).
    #[arg(long, default_value_t = 0.05)]
    radius: f64,
    /// Demo half extent (cylinder height, grid half width).
    #[arg(long, default_value_t = 1.0)]
    extent: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Demo {
    Cylinder,
    Sphere,
    Plane,
    Line,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FieldKind {
    Affine,
    Radial,
    Bump,
}

#[derive(Debug, Args)]
struct FirstvarArgs {
    /// Flagfold JSON: array of {x, S, m}.
    input: String,
    #[arg(long, value_enum)]
    field: FieldKind,
    /// Affine matrix A, row-major.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    matrix: Option<Vec<f64>>,
    /// Affine offset c.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    offset: Option<Vec<f64>>,
    /// Radial or bump center.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    center: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    scale: f64,
    /// Bump component (1-based).
    #[arg(long, default_value_t = 1)]
    component: usize,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    amplitude: f64,
}

#[derive(Debug, Args)]
struct MonotonicityArgs {
    /// Flagfold JSON: array of {x, S, m}.
    input: String,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x: Vec<f64>,
    #[arg(long = "d-star")]
    d_star: f64,
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    /// Explicit radii; otherwise `count` radii evenly spaced in [rmin, rmax].
    #[arg(long, value_delimiter = ',')]
    radii: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.1)]
    rmin: f64,
    #[arg(long, default_value_t = 0.5)]
    rmax: f64,
    #[arg(long, default_value_t = 9)]
    count: usize,
}

#[derive(Debug, Args)]
struct EuclidArgs {
    a: String,
    b: String,
    #[arg(long, default_value_t = 100)]
    steps: usize,
}

/// Parses `argv` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    match commands::dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
