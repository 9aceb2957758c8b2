use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use viewdir_core::coverage::Normalization;
use viewdir_core::evaluator::{EvaluatorBinding, OracleParams};
use viewdir_core::metrics::Spatial;
use viewdir_core::relax::Domain;

use crate::config::{parse_vec3, Format, Method, RunConfig, SplitMode};

#[derive(Debug, Parser)]
#[command(
    name = "viewdir",
    version,
    about = "View selection, test splits and coverage audits for posed camera sets"
)]
pub struct Cli {
    /// Run configuration file (TOML, or JSON by extension); flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Select training views and write one manifest per repetition.
    Select(SelectArgs),
    /// Generate a test split or rotated camera sets.
    Split(SplitArgs),
    /// Measure mesh coverage of one or two camera sets.
    Coverage(CoverageArgs),
    /// Score selection methods against the synthetic oracle and write a CSV.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OnOff {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpatialArg {
    Gc,
    Euc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DomainArg {
    Sphere,
    Hull,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormalizationArg {
    MaxCount,
    TotalHits,
    RayBudget,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// transforms.json file or COLMAP text model directory.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Dataset format; inferred from the path when omitted.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Project camera centers onto the unit sphere about their centroid.
    #[arg(long)]
    pub project_sphere: bool,
    /// Comma-separated seeds, one per repetition.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
    /// Number of repetitions (seeds 0..n when --seeds is absent).
    #[arg(long)]
    pub repetitions: Option<usize>,
    /// Repetitions run concurrently.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Record the creation time in manifests (makes outputs differ between runs).
    #[arg(long)]
    pub stamp_time: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct DistanceArgs {
    /// Spatial distance: great-circle or squared Euclidean.
    #[arg(long, value_enum)]
    pub spatial: Option<SpatialArg>,
    /// Weight of the photogrammetric distance (COLMAP input only).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Divide the spatial distance by its maximum over the pool.
    #[arg(long)]
    pub normalize_spatial: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SamplingArgs {
    /// Total number of selected views.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Number of random initial views.
    #[arg(long)]
    pub initial_k: Option<usize>,
    /// Comma-separated views added per round.
    #[arg(long, value_delimiter = ',')]
    pub schedule: Option<Vec<usize>>,
    #[command(flatten)]
    pub distance: DistanceArgs,
    /// Zipf sharpness.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// vMF concentration.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Softmax temperature of the vMF mixture weights.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Lloyd relaxation of each round's proposals.
    #[arg(long, value_enum)]
    pub relax: Option<OnOff>,
    /// Relaxation domain; the sphere when the rig is on the unit sphere, else the convex hull.
    #[arg(long, value_enum)]
    pub relax_domain: Option<DomainArg>,
    /// Lloyd iterations per round (default 8).
    #[arg(long)]
    pub lloyd_iters: Option<usize>,
    /// Atoms of the relaxation measure (default 20000).
    #[arg(long)]
    pub support_samples: Option<usize>,
    /// Shell command of an external evaluator process.
    #[arg(long, conflicts_with = "oracle")]
    pub evaluator_cmd: Option<String>,
    /// Seconds the external evaluator may take per round.
    #[arg(long, requires = "evaluator_cmd", default_value_t = 3600.0)]
    pub evaluator_timeout: f64,
    /// Score with the built-in synthetic oracle (default parameters).
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SelectArgs {
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SplitArgs {
    #[arg(long, value_enum)]
    pub mode: Option<SplitMode>,
    /// Number of test views.
    #[arg(long)]
    pub count: Option<usize>,
    /// Camera distance from the center (uniform-sphere).
    #[arg(long)]
    pub radius: Option<f64>,
    /// Look-at point and sphere center, `x,y,z`.
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub center: Option<[f64; 3]>,
    /// Comma-separated angles in degrees; one rotated test set per angle.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub rotate_z: Option<Vec<f64>>,
    #[command(flatten)]
    pub distance: DistanceArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CoverageArgs {
    /// OBJ file, or `icosphere:SUBDIV[:RADIUS]`.
    #[arg(long)]
    pub mesh: Option<String>,
    /// Manifest restricting the dataset to its selected views.
    #[arg(long)]
    pub selection: Option<PathBuf>,
    /// Second camera set to compare against.
    #[arg(long)]
    pub compare: Option<PathBuf>,
    #[arg(long)]
    pub surface_samples: Option<usize>,
    /// Ball radius ℓ; defaults to twice the mean nearest-sample distance.
    #[arg(long)]
    pub ball_radius: Option<f64>,
    /// Pixel stride.
    #[arg(long)]
    pub stride: Option<u32>,
    #[arg(long, value_enum)]
    pub normalization: Option<NormalizationArg>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Comma-separated methods to compare.
    #[arg(long, value_delimiter = ',', value_enum)]
    pub methods: Option<Vec<Method>>,
    /// Size of the Fibonacci pool used when no dataset is given.
    #[arg(long)]
    pub pool_size: Option<usize>,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

fn flag(b: bool) -> Option<bool> {
    b.then_some(true)
}

impl CommonArgs {
    fn apply(&self, c: &mut RunConfig) {
        c.dataset = self.dataset.clone();
        c.format = self.format;
        c.project_sphere = flag(self.project_sphere);
        c.seeds = self.seeds.clone();
        c.repetitions = self.repetitions;
        c.jobs = self.jobs;
        c.out = self.out.clone();
        c.stamp_time = flag(self.stamp_time);
    }
}

impl DistanceArgs {
    fn apply(&self, c: &mut RunConfig) {
        c.spatial = self.spatial.map(|s| match s {
            SpatialArg::Gc => Spatial::GreatCircle,
            SpatialArg::Euc => Spatial::Euclidean,
        });
        c.alpha = self.alpha;
        c.normalize_spatial = flag(self.normalize_spatial);
    }
}

impl SamplingArgs {
    fn apply(&self, c: &mut RunConfig) {
        c.budget = self.budget;
        c.initial_k = self.initial_k;
        c.schedule = self.schedule.clone();
        self.distance.apply(c);
        c.gamma = self.gamma;
        c.kappa = self.kappa;
        c.sigma = self.sigma;
        c.relax = self.relax.map(|r| r == OnOff::On);
        c.relax_domain = self.relax_domain.map(|d| match d {
            DomainArg::Sphere => Domain::Sphere,
            DomainArg::Hull => Domain::ConvexHull,
        });
        c.lloyd_iters = self.lloyd_iters;
        c.support_samples = self.support_samples;
        c.evaluator = match (&self.evaluator_cmd, self.oracle) {
            (Some(cmd), _) => Some(EvaluatorBinding::ExternalProcess {
                command: cmd.clone(),
                timeout_s: self.evaluator_timeout,
            }),
            (None, true) => Some(EvaluatorBinding::SyntheticOracle(OracleParams::default())),
            (None, false) => None,
        };
    }
}

impl Command {
    /// The flag layer of the configuration: only fields given on the command line are set.
    pub fn flag_config(&self) -> RunConfig {
        let mut c = RunConfig::default();
        match self {
            Command::Select(a) => {
                c.method = a.method;
                a.sampling.apply(&mut c);
                a.common.apply(&mut c);
            }
            Command::Split(a) => {
                c.split_mode = a.mode;
                c.count = a.count;
                c.radius = a.radius;
                c.center = a.center;
                c.rotate_z = a.rotate_z.clone();
                a.distance.apply(&mut c);
                a.common.apply(&mut c);
            }
            Command::Coverage(a) => {
                c.mesh = a.mesh.clone();
                c.selection = a.selection.clone();
                c.compare = a.compare.clone();
                c.surface_samples = a.surface_samples;
                c.ball_radius = a.ball_radius;
                c.stride = a.stride;
                c.normalization = a.normalization.map(|n| match n {
                    NormalizationArg::MaxCount => Normalization::MaxCount,
                    NormalizationArg::TotalHits => Normalization::TotalHits,
                    NormalizationArg::RayBudget => Normalization::RayBudget,
                });
                a.common.apply(&mut c);
            }
            Command::Simulate(a) => {
                c.methods = a.methods.clone();
                c.pool_size = a.pool_size;
                a.sampling.apply(&mut c);
                a.common.apply(&mut c);
            }
        }
        c
    }
}
