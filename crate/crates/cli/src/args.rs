use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "vqgen", version, about = "Variational generalized eigensolver with NPE/LDE pipelines")]
pub struct Cli {
    /// Root seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Shots per Pauli term (vqge) or per swap test (overlap metric); 0 = exact.
    #[arg(long, global = true, default_value_t = 0)]
    pub shots: u64,

    /// Output directory. Without it the main artifact goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Variational solver.
    #[command(subcommand)]
    Vqge(VqgeCommand),
    /// Dense reference solver.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Neighborhood preserving embedding.
    #[command(subcommand)]
    Npe(NpeCommand),
    /// Local discriminant embedding.
    #[command(subcommand)]
    Lde(LdeCommand),
}

#[derive(Debug, Subcommand)]
pub enum VqgeCommand {
    /// Interval, τ-scan and refinement: every distinct eigenvalue.
    Solve(VqgeArgs),
    /// Interval and τ-scan only.
    Scan(VqgeArgs),
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Generalized eigendecomposition of a dense pencil.
    Eig(PencilArgs),
}

#[derive(Debug, Clone, Args)]
pub struct PencilArgs {
    /// Built-in pencil: example1 or example2.
    #[arg(long, conflicts_with_all = ["g", "s", "g_dense", "s_dense"])]
    pub builtin: Option<String>,
    /// `G` as a Pauli text file.
    #[arg(long, requires = "s", conflicts_with_all = ["g_dense", "s_dense"])]
    pub g: Option<PathBuf>,
    /// `S` as a Pauli text file.
    #[arg(long, requires = "g")]
    pub s: Option<PathBuf>,
    /// `G` as a dense CSV matrix.
    #[arg(long, requires = "s_dense")]
    pub g_dense: Option<PathBuf>,
    /// `S` as a dense CSV matrix.
    #[arg(long, requires = "g_dense")]
    pub s_dense: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Rotation {
    Ry,
    Rzry,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    NelderMead,
    Gradient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanCostArg {
    Auto,
    ShiftSquare,
    ShiftRatio,
}

#[derive(Debug, Clone, Args)]
pub struct AnsatzArgs {
    /// Entangler+rotation repetitions (default 1 for built-ins, n otherwise).
    #[arg(long)]
    pub layers: Option<usize>,
    /// Rotation layer (default ry for built-ins, rzry otherwise).
    #[arg(long, value_enum)]
    pub rotation: Option<Rotation>,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizerArgs {
    #[arg(long, value_enum, default_value_t = MethodArg::NelderMead)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 2000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub f_tol: f64,
    /// Initial simplex edge in radians.
    #[arg(long, default_value_t = 0.5)]
    pub step: f64,
    #[arg(long, default_value_t = 0.2)]
    pub learning_rate: f64,
    /// Number of τ grid points.
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
    /// Solve grid points independently instead of warm-starting.
    #[arg(long)]
    pub no_warm_start: bool,
    /// Sweep the grid in one direction only.
    #[arg(long)]
    pub one_way: bool,
    #[arg(long, value_enum, default_value_t = ScanCostArg::Auto)]
    pub scan_cost: ScanCostArg,
    /// Overrides the detection threshold.
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct VqgeArgs {
    #[command(flatten)]
    pub pencil: PencilArgs,
    #[command(flatten)]
    pub ansatz: AnsatzArgs,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Dataset CSV, one point per row.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// The CSV has a header row.
    #[arg(long)]
    pub header: bool,
    /// The last CSV column is an integer label.
    #[arg(long)]
    pub labels: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverArg {
    Oracle,
    Vqge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Euclidean,
    Overlap,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[arg(long, value_enum, default_value_t = SolverArg::Oracle)]
    pub solver: SolverArg,
    #[arg(long, value_enum, default_value_t = MetricArg::Euclidean)]
    pub metric: MetricArg,
    /// Relative Tikhonov weight for local Gram matrices.
    #[arg(long, default_value_t = 1e-3)]
    pub reg: f64,
    /// Absolute ridge on the S side (default 1e-8·tr/D).
    #[arg(long)]
    pub ridge: Option<f64>,
    /// Ansatz repetitions for the vqge solver.
    #[arg(long, default_value_t = 3)]
    pub layers: usize,
    /// τ grid points for the vqge solver.
    #[arg(long, default_value_t = 300)]
    pub grid: usize,
}

#[derive(Debug, Subcommand)]
pub enum NpeCommand {
    /// Fit a projection; emits the D×d matrix and its eigenvalues.
    Fit(NpeFitArgs),
    /// Embed points with a fitted projection.
    Transform(TransformArgs),
}

#[derive(Debug, Clone, Args)]
pub struct NpeFitArgs {
    /// Built-in dataset: line.
    #[arg(long, conflicts_with = "data")]
    pub builtin: Option<String>,
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub d: usize,
    #[command(flatten)]
    pub fit: FitArgs,
}

#[derive(Debug, Clone, Args)]
pub struct TransformArgs {
    /// Projection CSV (D rows, d columns).
    #[arg(long)]
    pub projection: PathBuf,
    #[command(flatten)]
    pub data: DataArgs,
}

#[derive(Debug, Subcommand)]
pub enum LdeCommand {
    /// Fit a projection on labelled data.
    Fit(LdeFitArgs),
    /// Nearest-neighbor labels for test points.
    Classify(LdeClassifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct LdeFitArgs {
    /// Built-in dataset: two-blob (training split).
    #[arg(long, conflicts_with = "data")]
    pub builtin: Option<String>,
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub k_prime: usize,
    #[arg(long)]
    pub d: usize,
    #[command(flatten)]
    pub fit: FitArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistanceArg {
    Euclidean,
    Trace,
}

#[derive(Debug, Clone, Args)]
pub struct LdeClassifyArgs {
    /// Built-in dataset: two-blob (fits on the training split, classifies the test split).
    #[arg(long, conflicts_with_all = ["train", "test"])]
    pub builtin: Option<String>,
    /// Fitted projection CSV; without it one is fitted on the training set.
    #[arg(long)]
    pub projection: Option<PathBuf>,
    /// Labelled training CSV.
    #[arg(long)]
    pub train: Option<PathBuf>,
    /// Test CSV.
    #[arg(long)]
    pub test: Option<PathBuf>,
    /// The CSVs have a header row.
    #[arg(long)]
    pub header: bool,
    /// The test CSV carries labels; enables the accuracy report.
    #[arg(long)]
    pub test_labels: bool,
    #[arg(long, value_enum, default_value_t = DistanceArg::Euclidean)]
    pub distance: DistanceArg,
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    #[arg(long, default_value_t = 5)]
    pub k_prime: usize,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[command(flatten)]
    pub fit: FitArgs,
}
