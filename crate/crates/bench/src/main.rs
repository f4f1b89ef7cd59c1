use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use plof::ingest::{make_synthetic, write_labeled_csv, SyntheticSpec};
use plof::neighbors::Backend;
use plof::prune::PruneRule;
use plof_bench::config::{load_dataset_file, DetectorKind, ExperimentConfig};
use plof_bench::experiment::{run_detector, DetectorSettings};
use plof_bench::projection::write_projection_csv;
use plof_bench::tables::render_all;
use plof_bench::{emit_tables, project_2pc, run_experiment, write_scores, TableFormat};

const OUTPUT_ENV: &str = "PLOF_OUTPUT_DIR";

#[derive(Parser)]
#[command(name = "plof-bench", version, about = "Run and compare LOF-family outlier detectors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write tables and a report.
    Run(RunArgs),
    /// Score one dataset with one detector and write `id,score`.
    Score(ScoreArgs),
    /// Write a two-component projection with labels, for plotting.
    Project(ProjectArgs),
    /// Generate a labelled synthetic dataset as CSV.
    Synth(SynthArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (TOML).
    #[arg(long, short)]
    config: PathBuf,
    /// Output directory. Falls back to the config, then $PLOF_OUTPUT_DIR, then ./results.
    #[arg(long, short)]
    output_dir: Option<PathBuf>,
    /// Output formats; repeat or comma-separate.
    #[arg(long, short, value_delimiter = ',', default_values = ["text", "delimited", "structured"])]
    format: Vec<TableFormat>,
    /// Zero every timing field in the written report.
    #[arg(long)]
    omit_timing: bool,
    /// Comma-separated detector list, overriding the config.
    #[arg(long, value_delimiter = ',')]
    detectors: Option<Vec<DetectorKind>>,
    #[arg(long)]
    minpts: Option<usize>,
    #[arg(long)]
    repetitions: Option<usize>,
    #[arg(long)]
    backend: Option<Backend>,
    #[arg(long)]
    seed: Option<u64>,
    /// `threshold:<t>` or `top:<n>`.
    #[arg(long)]
    rule: Option<String>,
    #[arg(long)]
    prune_rule: Option<PruneRule>,
}

#[derive(Args)]
struct DetectorArgs {
    #[arg(long, default_value_t = 10)]
    minpts: usize,
    #[arg(long, default_value_t = Backend::default())]
    backend: Backend,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = PruneRule::default())]
    prune_rule: PruneRule,
    /// FastLOF chunk count (default ceil(N / (10 * minpts))).
    #[arg(long)]
    chunks: Option<usize>,
    /// devToMean cluster count (default ceil(sqrt(N))).
    #[arg(long)]
    clusters: Option<usize>,
    /// devToMean prune threshold; 0 disables pruning.
    #[arg(long, default_value_t = 1.0)]
    threshold: f64,
}

#[derive(Args)]
struct ScoreArgs {
    /// Dataset spec file (CSV spec, or synthetic spec with kind = "synthetic").
    #[arg(long, short)]
    dataset: PathBuf,
    #[arg(long, default_value = "plof")]
    detector: DetectorKind,
    #[command(flatten)]
    params: DetectorArgs,
    /// Score file; defaults to <output dir>/<dataset>.<detector>.scores.csv.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProjectArgs {
    #[arg(long, short)]
    dataset: PathBuf,
    /// Defaults to <output dir>/<dataset>.pca.csv.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Start from a synthetic spec file; flags below override its fields.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    n_inliers: Option<usize>,
    #[arg(long)]
    n_outliers: Option<usize>,
    #[arg(long)]
    dims: Option<usize>,
    #[arg(long)]
    clusters: Option<usize>,
    #[arg(long)]
    spread: Option<f64>,
    #[arg(long)]
    box_scale: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, short)]
    out: PathBuf,
}

enum Failure {
    Config(anyhow::Error),
    Partial(usize),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Config(e)
    }
}

impl From<plof_bench::BenchError> for Failure {
    fn from(e: plof_bench::BenchError) -> Self {
        Failure::Config(e.into())
    }
}

fn default_output_dir() -> PathBuf {
    std::env::var_os(OUTPUT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("results"))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into())
}

fn run(args: RunArgs) -> Result<(), Failure> {
    let mut config = ExperimentConfig::from_file(&args.config)?;
    if let Some(d) = args.detectors {
        config.detectors = d;
    }
    if let Some(k) = args.minpts {
        config.minpts = k;
    }
    if let Some(r) = args.repetitions {
        config.repetitions = r;
    }
    if let Some(b) = args.backend {
        config.backend = b;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(r) = args.rule {
        config.rule = r;
    }
    if let Some(p) = args.prune_rule {
        config.prune_rule = p;
    }
    let dir = args
        .output_dir
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(default_output_dir);

    let mut bundle = run_experiment(&config)?;
    if args.omit_timing {
        bundle = bundle.without_timing();
    }
    for format in args.format {
        for path in emit_tables(&bundle, format, &dir)? {
            eprintln!("wrote {}", path.display());
        }
    }
    print!("{}", render_all(&bundle));

    let failed = bundle.failed_cells();
    for cell in &bundle.cells {
        if let plof_bench::experiment::Cell::Failed(f) = cell {
            eprintln!("failed: {} / {}: {}", f.dataset, f.detector, f.error);
        }
    }
    if failed > 0 {
        return Err(Failure::Partial(failed));
    }
    Ok(())
}

fn score(args: ScoreArgs) -> anyhow::Result<()> {
    let (data, _) = load_dataset_file(&args.dataset)?;
    let p = args.params;
    let mut settings = DetectorSettings {
        minpts: p.minpts,
        backend: p.backend,
        prune_rule: p.prune_rule,
        ..DetectorSettings::default()
    };
    settings.fastlof.chunk_count = p.chunks;
    settings.devtomean.clusters = p.clusters;
    settings.devtomean.threshold = p.threshold;

    let out = run_detector(args.detector, &data, &settings, p.seed)
        .with_context(|| format!("scoring {}", args.dataset.display()))?;
    let path = args.out.unwrap_or_else(|| {
        default_output_dir().join(format!(
            "{}.{}.scores.csv",
            stem(&args.dataset),
            format!("{:?}", args.detector).to_lowercase()
        ))
    });
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    write_scores(&path, &out.scores)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn project(args: ProjectArgs) -> anyhow::Result<()> {
    let (data, truth) = load_dataset_file(&args.dataset)?;
    let proj = project_2pc(&data)?;
    let path = args
        .out
        .unwrap_or_else(|| default_output_dir().join(format!("{}.pca.csv", stem(&args.dataset))));
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    write_projection_csv(&path, &proj, &truth)?;
    eprintln!(
        "wrote {} (explained variance {:.4}, {:.4})",
        path.display(),
        proj.explained_variance[0],
        proj.explained_variance[1]
    );
    Ok(())
}

fn synth(args: SynthArgs) -> anyhow::Result<()> {
    let mut spec = match &args.spec {
        Some(path) => {
            let mut table: toml::Table = toml::from_str(&std::fs::read_to_string(path)?)
                .with_context(|| path.display().to_string())?;
            table.remove("kind");
            table.try_into::<SyntheticSpec>()?
        }
        None => SyntheticSpec::default(),
    };
    spec.n_inliers = args.n_inliers.unwrap_or(spec.n_inliers);
    spec.n_outliers = args.n_outliers.unwrap_or(spec.n_outliers);
    spec.dims = args.dims.unwrap_or(spec.dims);
    spec.cluster_count = args.clusters.unwrap_or(spec.cluster_count);
    spec.cluster_spread = args.spread.unwrap_or(spec.cluster_spread);
    spec.outlier_box_scale = args.box_scale.unwrap_or(spec.outlier_box_scale);
    spec.seed = args.seed.unwrap_or(spec.seed);

    let (data, truth) = make_synthetic(&spec)?;
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    write_labeled_csv(&args.out, &data, &truth)?;
    eprintln!("wrote {} ({} points)", args.out.display(), data.len());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors share the config-error code; 2 means failed cells
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Score(a) => score(a).map_err(Failure::from),
        Command::Project(a) => project(a).map_err(Failure::from),
        Command::Synth(a) => synth(a).map_err(Failure::from),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Partial(n)) => {
            eprintln!("{n} cell(s) failed");
            ExitCode::from(2)
        }
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
