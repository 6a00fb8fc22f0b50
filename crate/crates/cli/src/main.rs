//! `mvcoreset`: build and evaluate coresets for clustering with missing values.

mod commands;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mvcoreset::bench::FarLayout;
use mvcoreset::io::HeaderMode;

#[derive(Debug, Parser)]
#[command(name = "mvcoreset", version, about = "Coresets for (k,z)-clustering of points with missing coordinates")]
pub struct Cli {
    /// Master seed; every random choice is derived from it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// JSON config file. Flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Directory for relative output paths.
    #[arg(long, global = true, env = settings::OUT_DIR_ENV)]
    pub out_dir: Option<PathBuf>,

    /// More logging (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a weighted coreset from a CSV dataset.
    #[command(subcommand)]
    Coreset(CoresetCommand),
    /// Empirical error of a coreset over a collection of center sets.
    Evaluate(EvaluateArgs),
    /// Lloyd's k-means on a dataset or a weighted coreset.
    Lloyd(LloydArgs),
    /// Generate a dataset.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Size-versus-error sweep, or the Lloyd speedup experiment.
    Sweep(SweepArgs),
    /// Build or verify coordinate families.
    #[command(subcommand)]
    Family(FamilyCommand),
}

#[derive(Debug, Subcommand)]
pub enum CoresetCommand {
    /// Importance sampling with peeled k-center scores.
    Build(CoresetArgs),
    /// Uniform sampling baseline.
    Uniform(CoresetArgs),
    /// Random imputation followed by importance sampling.
    Impute(CoresetArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum HeaderArg {
    Auto,
    Yes,
    No,
}

impl From<HeaderArg> for HeaderMode {
    fn from(h: HeaderArg) -> Self {
        match h {
            HeaderArg::Auto => HeaderMode::Auto,
            HeaderArg::Yes => HeaderMode::Yes,
            HeaderArg::No => HeaderMode::No,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Dataset CSV; "?" or an empty cell marks a missing value.
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long)]
    pub delimiter: Option<char>,
    #[arg(long, value_enum)]
    pub header: Option<HeaderArg>,
}

#[derive(Debug, Clone, Args)]
pub struct SensitivityArgs {
    /// Subsets drawn for the coordinate family. Without it the theoretical
    /// size is used, up to --family-cap.
    #[arg(long)]
    pub family_size: Option<usize>,
    #[arg(long)]
    pub family_cap: Option<usize>,
    #[arg(long)]
    pub c_alpha: Option<f64>,
    #[arg(long)]
    pub c_sigma: Option<f64>,
    /// Scale of the number of random projections.
    #[arg(long)]
    pub c_l: Option<f64>,
    /// Furthest-point backend: projection or exact.
    #[arg(long)]
    pub backend: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct CoresetArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub z: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Number of draws (or `n_samples` in the config file).
    #[arg(long)]
    pub n_samples: Option<usize>,
    /// Keep one entry per draw instead of summing repeated ids.
    #[arg(long)]
    pub no_merge: bool,
    #[command(flatten)]
    pub sensitivity: SensitivityArgs,
    /// Coreset CSV (stdout if omitted).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Also write the per-point importance scores.
    #[arg(long)]
    pub scores_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Coreset CSV as written by `coreset`.
    #[arg(long)]
    pub coreset: PathBuf,
    /// Evaluate a single center set from a CSV file.
    #[arg(long, conflicts_with = "adversarial")]
    pub centers: Option<PathBuf>,
    /// Per point, centers that sit at distance 1 from it and 0 from every
    /// point whose coordinates are not a subset of its own.
    #[arg(long)]
    pub adversarial: bool,
    /// Random center sets drawn from the bounding box.
    #[arg(long)]
    pub n_centers: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub z: Option<f64>,
    /// Per-set relative deviations as CSV.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct LloydArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Run on this coreset instead of the full data.
    #[arg(long)]
    pub coreset: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Comma-separated dataset ids of the initial centers.
    #[arg(long, value_delimiter = ',', conflicts_with = "restarts")]
    pub init_ids: Option<Vec<usize>>,
    #[arg(long)]
    pub centers_out: Option<PathBuf>,
    #[arg(long)]
    pub assignment_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LayoutArg {
    Scattered,
    Blob,
}

impl From<LayoutArg> for FarLayout {
    fn from(l: LayoutArg) -> Self {
        match l {
            LayoutArg::Scattered => FarLayout::Scattered,
            LayoutArg::Blob => FarLayout::Blob,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Unit-cube cluster plus far points, with attributes deleted at random.
    Synthetic(SyntheticArgs),
    /// All (2j choose j) points with exactly j available coordinates set to 1.
    Lowerbound(LowerBoundArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SyntheticArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub frac_far: Option<f64>,
    #[arg(long)]
    pub delete_frac: Option<f64>,
    #[arg(long)]
    pub far_offset: Option<f64>,
    #[arg(long, value_enum)]
    pub layout: Option<LayoutArg>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct LowerBoundArgs {
    #[arg(long)]
    pub j: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Dataset CSV. Without it the `experiment.dataset` of the config is
    /// used, or a synthetic dataset.
    #[arg(long, short, conflicts_with_all = ["synthetic_n", "lowerbound_j"])]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub delimiter: Option<char>,
    #[arg(long, value_enum)]
    pub header: Option<HeaderArg>,
    /// Generate a synthetic dataset with this many points.
    #[arg(long, conflicts_with = "lowerbound_j")]
    pub synthetic_n: Option<usize>,
    /// Use the lower-bound instance with this j.
    #[arg(long)]
    pub lowerbound_j: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub z: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    #[arg(long)]
    pub n_centers: Option<usize>,
    #[arg(long)]
    pub adversarial: bool,
    #[arg(long)]
    pub family_size: Option<usize>,
    /// Run the Lloyd speedup experiment instead of the error sweep.
    #[arg(long)]
    pub lloyd_speedup: bool,
    #[arg(long)]
    pub lloyd_iters: Option<usize>,
    #[arg(long)]
    pub lloyd_restarts: Option<usize>,
    /// Output prefix: writes PREFIX.csv and PREFIX.json.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Speedup rows with wall-clock timings. Kept apart from the main
    /// outputs, which stay identical across runs.
    #[arg(long)]
    pub timings_out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum FamilyCommand {
    /// Draw a random coordinate family and write it as JSON.
    Build(FamilyBuildArgs),
    /// Check that a family covers every disjoint (J, K) pair.
    Verify(FamilyVerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct FamilyBuildArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub j: usize,
    #[arg(long)]
    pub k: usize,
    /// Subsets to draw (default: theoretical size up to --cap).
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long)]
    pub cap: Option<usize>,
    /// Verify exhaustively after building.
    #[arg(long)]
    pub verify: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct FamilyVerifyArgs {
    /// Family JSON as written by `family build`.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Check this many random pairs instead of all of them.
    #[arg(long)]
    pub sampled: Option<usize>,
    /// Maximum pairs for exhaustive checking.
    #[arg(long)]
    pub budget: Option<u128>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match commands::run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
