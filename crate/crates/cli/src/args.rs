use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "spiralemb",
    version,
    about = "Spiral embeddings, the double spiral and the ball-packing estimate chain",
    args_override_self = true
)]
pub struct Cli {
    /// JSON file whose keys mirror the flags of the chosen subcommand; flags
    /// given on the command line win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the simple spiral on a grid of R(A, B).
    Spiral(SpiralArgs),
    /// Sample the glued double spiral on the domain model.
    DoubleSpiral(DoubleSpiralArgs),
    /// Compare the closed-form strip flow with RK4, or flow one point.
    Flow(FlowArgs),
    /// Sup of |z1|^2 + |z2|^2 over sampled inputs with the estimate chain.
    ChainVerify(ChainArgs),
    /// Run one generic check on one map.
    Verify(VerifyArgs),
    /// Parameter planners.
    Plan(PlanArgs),
    /// Render a figure as SVG.
    Figure(FigureArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrientationArg {
    Symplectic,
    Printed,
}

#[derive(Debug, Clone, Args)]
pub struct SpiralFlags {
    #[arg(long = "A", default_value_t = 1.0)]
    pub a: f64,
    #[arg(long = "B", default_value_t = 1.0)]
    pub b: f64,
    #[arg(long, default_value_t = 0.05)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub r: f64,
    /// Angular offset, 0 or 0.5.
    #[arg(long, default_value_t = 0.0)]
    pub theta_offset: f64,
    #[arg(long, value_enum, default_value_t = OrientationArg::Symplectic)]
    pub orientation: OrientationArg,
}

#[derive(Debug, Args)]
pub struct SpiralArgs {
    #[command(flatten)]
    pub spiral: SpiralFlags,
    /// Grid resolution per axis.
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SamplingArg {
    /// The strip plus one strand on each side.
    Strands,
    /// The full rectangles R1 u R2.
    Rectangles,
}

#[derive(Debug, Args)]
pub struct DoubleSpiralArgs {
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long = "A", default_value_t = 1.0)]
    pub a: f64,
    /// Defaults to max(8, 16 eps B).
    #[arg(long = "M")]
    pub m: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
    #[arg(long, value_enum, default_value_t = SamplingArg::Rectangles)]
    pub sampling: SamplingArg,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long = "A", default_value_t = 1.0)]
    pub a: f64,
    /// Random states compared against RK4.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Flow a single point `x1,y1,x2,y2` instead.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_name = "X1,Y1,X2,Y2")]
    pub point: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long = "A", default_value_t = 1.0)]
    pub a: f64,
    #[arg(long = "M")]
    pub m: Option<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    #[arg(long, default_value_t = spiralemb::chain::DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = SamplingArg::Strands)]
    pub sampling: SamplingArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckName {
    Symplectic,
    Fd,
    Injective,
    Contained,
    Avoids,
    Area,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MapName {
    Identity,
    Spiral,
    F,
    Beta1,
    Beta2,
    Tuck,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub check: CheckName,
    #[arg(long, value_enum, default_value_t = MapName::Spiral)]
    pub map: MapName,
    #[command(flatten)]
    pub spiral: SpiralFlags,
    /// Sub-length for spiral checks; defaults to A.
    #[arg(long = "L")]
    pub l: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long = "M")]
    pub m: Option<f64>,
    #[arg(long, default_value_t = 300)]
    pub grid: usize,
    /// Seeded random points added to the grid.
    #[arg(long, default_value_t = 0)]
    pub random: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Tolerance; defaults per check.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Ball radius for contained/avoids; defaults to the map's own bound.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Monte-Carlo samples for the area check.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    #[arg(long)]
    pub domain_sep: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlanMode {
    Kh,
    Family,
    Nesting,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long, value_enum)]
    pub mode: PlanMode,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long = "T", default_value_t = 1.0)]
    pub t: f64,
    /// Strictly decreasing list for nesting mode.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.05,0.02,0.01")]
    pub eps_list: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureName {
    Spiral,
    SquareToBall,
    DoubleSpiral,
    DomainModel,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[arg(long, value_enum)]
    pub name: FigureName,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Polylines per figure.
    #[arg(long, default_value_t = 6)]
    pub rows: usize,
    /// Points per polyline.
    #[arg(long, default_value_t = 4000)]
    pub points: usize,
    #[arg(long, default_value = "figure.svg")]
    pub out: PathBuf,
    /// Also write the plotted points as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}
