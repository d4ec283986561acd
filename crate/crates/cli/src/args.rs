use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "smw", version, about = "Semantic Mutex Watershed segmentation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Segment a graph given in SMWG text format.
    SegmentGraph(SegmentGraphArgs),
    /// Segment a pixel/voxel grid from affinity and class-probability tensors.
    SegmentGrid(SegmentGridArgs),
    /// Compare against the brute-force optimum and check the constraints.
    Verify(VerifyArgs),
    /// Time segmentation of synthetic volumes of growing size.
    Bench(BenchArgs),
    /// Panoptic quality of a prediction against ground truth.
    Eval(EvalArgs),
    /// Run a comparison method.
    Baseline(BaselineArgs),
    /// Write seeded synthetic inputs.
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
pub struct SegmentGraphArgs {
    /// Input graph file.
    #[arg(long)]
    pub graph: PathBuf,
    /// Output node file (`node cluster label` per line).
    #[arg(long)]
    pub out: PathBuf,
    /// Summary JSON (defaults to `<out>.summary.json`).
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Add wall-clock runtime to the summary.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct GridInputs {
    /// Affinity tensor, shape `[offsets, spatial...]`.
    #[arg(long)]
    pub affinities: PathBuf,
    /// Offset file, one `A|R d0 d1 ...` line per affinity channel.
    #[arg(long)]
    pub offsets: PathBuf,
    /// Class probabilities, shape `[classes, spatial...]`.
    #[arg(long)]
    pub semantic: Option<PathBuf>,
    /// Comma-separated stuff classes (instance 0 in the output).
    #[arg(long, value_delimiter = ',')]
    pub stuff: Vec<u32>,
}

#[derive(Debug, Args)]
pub struct SegmentGridArgs {
    #[command(flatten)]
    pub input: GridInputs,
    /// Split every channel at this value instead of using offset polarities.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Drop semantic edges with probability at or below this value.
    #[arg(long, default_value_t = 0.0)]
    pub semantic_epsilon: f32,
    /// Add joint-probability edges for the stuff classes on attractive offsets.
    #[arg(long)]
    pub stuff_affinity: bool,
    /// Output prefix; writes `<out>.class.*`, `<out>.instance.*` and `<out>.summary.json`.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Graph file to verify.
    #[arg(required_unless_present = "random", conflicts_with = "random")]
    pub graph: Option<PathBuf>,
    /// Verify this many seeded random graphs instead.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Skip the optimality comparison.
    #[arg(long)]
    pub constraints_only: bool,
    /// Require a class for every node in the polytope check.
    #[arg(long)]
    pub strict_assignment: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Cube side lengths.
    #[arg(long, value_delimiter = ',', default_values_t = [16usize, 32, 64, 96])]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV output; printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fail when the fitted log-log slope exceeds this value.
    #[arg(long)]
    pub max_slope: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Prediction prefix (`<pred>.class`, `<pred>.instance`).
    #[arg(long)]
    pub pred: PathBuf,
    /// Ground-truth prefix.
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long, value_delimiter = ',')]
    pub things: Vec<i32>,
    #[arg(long, value_delimiter = ',')]
    pub stuff: Vec<i32>,
    /// Also write the report as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Leave classes absent from the ground truth out of the means.
    #[arg(long)]
    pub exclude_prediction_only: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaselineMethod {
    /// Mutex watershed without semantic edges, then per-cluster arg-max class.
    MwsMax,
    /// Connected components of the arg-max class map.
    CcSem,
    /// Connected components of thresholded attractive affinities.
    CcAff,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[arg(value_enum)]
    pub method: BaselineMethod,
    /// Graph input (mws-max only); writes a node file.
    #[arg(long, conflicts_with_all = ["affinities", "offsets", "semantic"])]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub affinities: Option<PathBuf>,
    #[arg(long)]
    pub offsets: Option<PathBuf>,
    #[arg(long)]
    pub semantic: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub stuff: Vec<u32>,
    /// Binarization threshold for cc-aff.
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenerateKind {
    /// Small random graph in SMWG format.
    Graph,
    /// Two touching instances below a stuff band, with ground truth.
    Scene,
    /// Cubic block volume.
    Volume,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub kind: GenerateKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Cube side for `volume`.
    #[arg(long, default_value_t = 16)]
    pub side: usize,
    /// Output file (graph) or prefix (scene, volume).
    #[arg(long)]
    pub out: PathBuf,
}
