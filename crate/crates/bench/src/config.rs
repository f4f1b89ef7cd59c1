//! Experiment description, read from TOML.
//!
//! ```toml
//! name = "example"
//! detectors = ["plof", "lof", "devtomean", "fastlof"]
//! minpts = 10
//! repetitions = 5
//! backend = "kd-tree"
//! seed = 42
//! rule = "threshold:1.0"
//!
//! [[datasets]]
//! name = "Wine"
//! kind = "file"
//! spec = "datasets/wine.toml"
//!
//! [[datasets]]
//! name = "Blobs"
//! kind = "synthetic"
//! n_inliers = 950
//! n_outliers = 50
//! dims = 2
//! ```

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use plof::ingest::{load_csv, make_synthetic, DatasetSpec, SyntheticSpec};
use plof::metrics::DecisionRule;
use plof::neighbors::Backend;
use plof::prune::PruneRule;
use plof::{GroundTruth, PointSet};
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectorKind {
    Lof,
    Plof,
    FastLof,
    DevToMean,
    /// Returns all-zero scores without touching the data; used to check
    /// that timing covers only detector work.
    Noop,
}

impl DetectorKind {
    pub fn display_name(self) -> &'static str {
        match self {
            DetectorKind::Lof => "LOF",
            DetectorKind::Plof => "PLOF",
            DetectorKind::FastLof => "FastLOF",
            DetectorKind::DevToMean => "devToMean",
            DetectorKind::Noop => "noop",
        }
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

impl FromStr for DetectorKind {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lof" => Ok(DetectorKind::Lof),
            "plof" => Ok(DetectorKind::Plof),
            "fastlof" => Ok(DetectorKind::FastLof),
            "devtomean" => Ok(DetectorKind::DevToMean),
            "noop" => Ok(DetectorKind::Noop),
            other => Err(BenchError::Config(format!("unknown detector `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DatasetSource {
    Csv(DatasetSpec),
    Synthetic(SyntheticSpec),
    /// A separate spec file (either a CSV spec or a synthetic spec with
    /// `kind = "synthetic"`), relative to the config file.
    File { spec: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetEntry {
    pub name: String,
    #[serde(flatten)]
    pub source: DatasetSource,
}

impl DatasetEntry {
    pub fn load(&self) -> Result<(PointSet, GroundTruth)> {
        match &self.source {
            DatasetSource::Csv(spec) => Ok(load_csv(spec)?),
            DatasetSource::Synthetic(spec) => Ok(make_synthetic(spec)?),
            DatasetSource::File { spec } => load_dataset_file(spec),
        }
    }

    fn resolve_relative_to(&mut self, dir: &Path) {
        match &mut self.source {
            DatasetSource::Csv(spec) => spec.resolve_relative_to(dir),
            DatasetSource::Synthetic(_) => {}
            DatasetSource::File { spec } => {
                if spec.is_relative() {
                    *spec = dir.join(&*spec);
                }
            }
        }
    }
}

/// Loads a standalone dataset spec file: a CSV spec, or a synthetic spec
/// marked with `kind = "synthetic"`.
pub fn load_dataset_file(path: &Path) -> Result<(PointSet, GroundTruth)> {
    let text = fs::read_to_string(path)
        .map_err(|e| BenchError::Config(format!("{}: {e}", path.display())))?;
    let mut table: toml::Table =
        toml::from_str(&text).map_err(|e| BenchError::Config(format!("{}: {e}", path.display())))?;
    match table.remove("kind").as_ref().and_then(|k| k.as_str()) {
        Some("synthetic") => {
            let spec: SyntheticSpec = table
                .try_into()
                .map_err(|e| BenchError::Config(format!("{}: {e}", path.display())))?;
            Ok(make_synthetic(&spec)?)
        }
        Some("csv") | None => {
            let mut spec: DatasetSpec = table
                .try_into()
                .map_err(|e| BenchError::Config(format!("{}: {e}", path.display())))?;
            spec.resolve_relative_to(path.parent().unwrap_or(Path::new(".")));
            Ok(load_csv(&spec)?)
        }
        Some(other) => Err(BenchError::Config(format!(
            "{}: unsupported dataset kind `{other}`",
            path.display()
        ))),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FastLofParams {
    /// Defaults to `ceil(N / (10 * minpts))`.
    pub chunk_count: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DevToMeanParams {
    /// Defaults to `ceil(sqrt(N))`.
    pub clusters: Option<usize>,
    #[serde(default = "one")]
    pub threshold: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
}

impl Default for DevToMeanParams {
    fn default() -> Self {
        Self {
            clusters: None,
            threshold: 1.0,
            max_iters: default_max_iters(),
        }
    }
}

fn one() -> f64 {
    1.0
}

fn default_max_iters() -> usize {
    plof::baselines::DEFAULT_MAX_ITERS
}

fn default_minpts() -> usize {
    10
}

fn default_repetitions() -> usize {
    5
}

fn default_rule() -> String {
    DecisionRule::default().to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    pub datasets: Vec<DatasetEntry>,
    pub detectors: Vec<DetectorKind>,
    #[serde(default = "default_minpts")]
    pub minpts: usize,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub backend: Backend,
    /// Repetition `r` uses seed `seed + r`.
    #[serde(default)]
    pub seed: u64,
    /// `threshold:<t>` or `top:<n>`.
    #[serde(default = "default_rule")]
    pub rule: String,
    #[serde(default)]
    pub prune_rule: PruneRule,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub fastlof: FastLofParams,
    #[serde(default)]
    pub devtomean: DevToMeanParams,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self> {
        let mut config: ExperimentConfig =
            toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
        for d in &mut config.datasets {
            d.resolve_relative_to(base_dir);
        }
        if let Some(out) = &config.output_dir {
            if out.is_relative() {
                config.output_dir = Some(base_dir.join(out));
            }
        }
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| BenchError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn decision_rule(&self) -> Result<DecisionRule> {
        Ok(self.rule.parse()?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.datasets.is_empty() {
            return Err(BenchError::Config("no datasets configured".into()));
        }
        if self.detectors.is_empty() {
            return Err(BenchError::Config("no detectors configured".into()));
        }
        if self.repetitions == 0 {
            return Err(BenchError::Config("repetitions must be at least 1".into()));
        }
        if self.minpts == 0 {
            return Err(BenchError::Config("minpts must be at least 1".into()));
        }
        self.decision_rule()?;
        Ok(())
    }
}
