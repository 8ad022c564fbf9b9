use std::path::PathBuf;

use capvar::bem::DEFAULT_ORDER;
use capvar::varprinciple::{DEFAULT_APPROACH_FACTOR, DEFAULT_SWEEP_STEPS};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "capvar", version, about = "Capacitance of a conductor by boundary elements, with variational bounds")]
pub struct Cli {
    /// Worker threads for assembly (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..=1024))]
    pub threads: Option<u32>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a built-in shape to an OBJ or STL file.
    Generate(GenerateArgs),
    /// Solve for the capacitance and report every bound.
    Solve(SolveArgs),
    /// Solve over a refinement sequence and extrapolate.
    Converge(ConvergeArgs),
    /// Check the max-quotient principle on a symmetric matrix.
    VerifyPrinciple(PrincipleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Shape {
    Icosphere,
    Cube,
    Ellipsoid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FileFormat {
    Obj,
    Stl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverChoice {
    Direct,
    Cg,
    Auto,
}

/// Parameters of a built-in shape.
#[derive(Debug, Clone, Args)]
pub struct ShapeParams {
    /// Sphere radius.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub radius: f64,
    /// Cube side length.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub side: f64,
    /// Ellipsoid semi-axes `a,b,c`.
    #[arg(long, value_delimiter = ',', num_args = 1, allow_negative_numbers = true)]
    pub semiaxes: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub shape: Shape,
    #[command(flatten)]
    pub params: ShapeParams,
    /// Icosahedron subdivisions (icosphere, ellipsoid).
    #[arg(long, default_value_t = 2)]
    pub subdiv: u32,
    /// Squares per cube edge; each square is split into two triangles.
    #[arg(long, default_value_t = 4)]
    pub panels_per_edge: usize,
    /// Output format; inferred from the extension when omitted. STL is
    /// written in the binary flavour.
    #[arg(long)]
    pub format: Option<FileFormat>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
#[group(id = "source", required = true, multiple = false, args = ["shape", "mesh"])]
pub struct MeshSource {
    #[arg(long)]
    pub shape: Option<Shape>,
    /// Mesh file (OBJ, ASCII or binary STL).
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    /// Mesh file format; inferred from the extension when omitted.
    #[arg(long, requires = "mesh")]
    pub format: Option<FileFormat>,
    #[command(flatten)]
    pub params: ShapeParams,
    #[arg(long, default_value_t = 2)]
    pub subdiv: u32,
    #[arg(long, default_value_t = 4)]
    pub panels_per_edge: usize,
}

#[derive(Debug, Clone, Args)]
pub struct NumericArgs {
    /// Order of the outer triangle quadrature.
    #[arg(long, default_value_t = DEFAULT_ORDER as u8, value_parser = clap::value_parser!(u8).range(1..=7))]
    pub quad_order: u8,
    #[arg(long, value_enum, default_value_t = SolverChoice::Direct)]
    pub solver: SolverChoice,
    /// Recorded in the report; the solve itself is deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub source: MeshSource,
    #[command(flatten)]
    pub numeric: NumericArgs,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print JSON instead of a summary.
    #[arg(long)]
    pub json: bool,
    /// Dump the Galerkin matrix to `<path>` (row-major f64) and
    /// `<path>.json`.
    #[arg(long, value_name = "PATH")]
    pub dump_matrix: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergeArgs {
    #[arg(long)]
    pub shape: Shape,
    #[command(flatten)]
    pub params: ShapeParams,
    /// Refinement levels: subdivisions for icosphere and ellipsoid, panels
    /// per edge for the cube.
    #[arg(long, value_delimiter = ',', required = true)]
    pub levels: Vec<usize>,
    #[command(flatten)]
    pub numeric: NumericArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct PrincipleArgs {
    /// JSON file `{"schema": "symform/1", "matrix": [[...]], "u": [...]}`.
    #[arg(long)]
    pub matrix: PathBuf,
    /// Random probe directions.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..=10_000_000))]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Pole-approach steps of the witness sweep.
    #[arg(long, default_value_t = DEFAULT_SWEEP_STEPS)]
    pub steps: usize,
    /// Ratio between successive pole distances in the sweep.
    #[arg(long, default_value_t = DEFAULT_APPROACH_FACTOR)]
    pub approach_factor: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}
