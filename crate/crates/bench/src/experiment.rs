//! Runs every configured detector on every configured dataset.

use std::time::Instant;

use plof::baselines::{default_chunk_count, default_cluster_count, fastlof, DevToMean};
use plof::lof::{lof_all, MinPts};
use plof::metrics::{binarize, confusion, roc_auc, DecisionRule};
use plof::neighbors::Backend;
use plof::prune::{prune_rate, Plof, PruneRule};
use plof::{GroundTruth, PointSet, ScoreVector};
use serde::{Deserialize, Serialize};

use crate::config::{DetectorKind, DevToMeanParams, ExperimentConfig, FastLofParams};
use crate::error::{BenchError, Result};

/// Everything a detector needs besides the data and the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorSettings {
    pub minpts: usize,
    pub backend: Backend,
    pub prune_rule: PruneRule,
    pub fastlof: FastLofParams,
    pub devtomean: DevToMeanParams,
}

impl DetectorSettings {
    pub fn from_config(config: &ExperimentConfig) -> Self {
        Self {
            minpts: config.minpts,
            backend: config.backend,
            prune_rule: config.prune_rule,
            fastlof: config.fastlof.clone(),
            devtomean: config.devtomean.clone(),
        }
    }
}

impl Default for DetectorSettings {
    fn default() -> Self {
        Self {
            minpts: 10,
            backend: Backend::default(),
            prune_rule: PruneRule::default(),
            fastlof: FastLofParams::default(),
            devtomean: DevToMeanParams::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DetectorOutput {
    pub scores: ScoreVector,
    /// Fraction of points the detector skipped, for detectors that prune.
    pub prune_rate: Option<f64>,
}

/// Runs one detector. This is exactly the region the harness times: index
/// construction plus scoring.
pub fn run_detector(
    kind: DetectorKind,
    data: &PointSet,
    settings: &DetectorSettings,
    seed: u64,
) -> Result<DetectorOutput> {
    if kind == DetectorKind::Noop {
        return Ok(DetectorOutput {
            scores: ScoreVector::new(vec![0.0; data.len()]),
            prune_rate: None,
        });
    }
    let minpts = MinPts::new(settings.minpts)?;
    let out = match kind {
        DetectorKind::Lof => DetectorOutput {
            scores: lof_all(data, minpts, settings.backend)?,
            prune_rate: None,
        },
        DetectorKind::Plof => {
            let out = Plof::new(minpts)
                .with_backend(settings.backend)
                .with_rule(settings.prune_rule)
                .run(data)?;
            DetectorOutput {
                prune_rate: Some(prune_rate(&out.mask)),
                scores: out.scores,
            }
        }
        DetectorKind::FastLof => {
            let chunks = settings
                .fastlof
                .chunk_count
                .unwrap_or_else(|| default_chunk_count(data.len(), minpts));
            DetectorOutput {
                scores: fastlof(data, minpts, chunks, seed, settings.backend)?.scores,
                prune_rate: None,
            }
        }
        DetectorKind::DevToMean => {
            let detector = DevToMean {
                clusters: settings.devtomean.clusters,
                threshold: settings.devtomean.threshold,
                max_iters: settings.devtomean.max_iters,
                backend: settings.backend,
                ..DevToMean::new(minpts)
            };
            let out = detector.run(data, seed)?;
            DetectorOutput {
                prune_rate: Some(out.prune_rate()),
                scores: out.scores,
            }
        }
        DetectorKind::Noop => unreachable!(),
    };
    Ok(out)
}

/// Mean and population spread over repetitions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub variance: f64,
    pub std: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Self {
            mean,
            variance: var,
            std: var.sqrt(),
        }
    }
}

/// Per-detector parameters actually used, after defaults were resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamEcho {
    pub minpts: usize,
    pub backend: Backend,
    pub rule: DecisionRule,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub prune_rule: Option<PruneRule>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub chunk_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub clusters: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_iters: Option<usize>,
}

impl ParamEcho {
    fn new(kind: DetectorKind, settings: &DetectorSettings, rule: DecisionRule, n: usize) -> Self {
        let mut echo = ParamEcho {
            minpts: settings.minpts,
            backend: settings.backend,
            rule,
            prune_rule: None,
            chunk_count: None,
            clusters: None,
            threshold: None,
            max_iters: None,
        };
        match kind {
            DetectorKind::Plof => echo.prune_rule = Some(settings.prune_rule),
            DetectorKind::FastLof => {
                echo.chunk_count = settings.fastlof.chunk_count.or_else(|| {
                    MinPts::new(settings.minpts)
                        .ok()
                        .map(|k| default_chunk_count(n, k))
                })
            }
            DetectorKind::DevToMean => {
                echo.clusters = Some(
                    settings
                        .devtomean
                        .clusters
                        .unwrap_or_else(|| default_cluster_count(n)),
                );
                echo.threshold = Some(settings.devtomean.threshold);
                echo.max_iters = Some(settings.devtomean.max_iters);
            }
            DetectorKind::Lof | DetectorKind::Noop => {}
        }
        echo
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub dataset: String,
    pub detector: DetectorKind,
    pub seeds: Vec<u64>,
    pub elapsed_seconds: Summary,
    pub accuracy: Summary,
    pub precision: Summary,
    pub recall: Summary,
    pub auc: Summary,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub prune_rate: Option<Summary>,
    /// Repetitions where nothing was flagged, so precision was reported as 0.
    pub precision_undefined_runs: usize,
    /// Repetitions with no true outliers, so recall was reported as 0.
    pub recall_undefined_runs: usize,
    pub params: ParamEcho,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedCell {
    pub dataset: String,
    pub detector: DetectorKind,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Cell {
    Ok(EvalReport),
    Failed(FailedCell),
}

impl Cell {
    pub fn dataset(&self) -> &str {
        match self {
            Cell::Ok(r) => &r.dataset,
            Cell::Failed(f) => &f.dataset,
        }
    }

    pub fn detector(&self) -> DetectorKind {
        match self {
            Cell::Ok(r) => r.detector,
            Cell::Failed(f) => f.detector,
        }
    }

    pub fn report(&self) -> Option<&EvalReport> {
        match self {
            Cell::Ok(r) => Some(r),
            Cell::Failed(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub name: String,
    pub points: usize,
    pub dims: usize,
    pub outliers: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub load_error: Option<String>,
}

/// Column means over the successful cells of one detector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AverageRow {
    pub detector: DetectorKind,
    pub cells: usize,
    pub elapsed_seconds: Option<f64>,
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub auc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub name: String,
    pub repetitions: usize,
    pub base_seed: u64,
    pub rule: DecisionRule,
    pub settings: DetectorSettings,
    pub datasets: Vec<DatasetInfo>,
    pub detectors: Vec<DetectorKind>,
    /// Dataset-major, in config order.
    pub cells: Vec<Cell>,
    pub averages: Vec<AverageRow>,
}

impl ReportBundle {
    pub fn cell(&self, dataset: &str, detector: DetectorKind) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.dataset() == dataset && c.detector() == detector)
    }

    pub fn average(&self, detector: DetectorKind) -> Option<&AverageRow> {
        self.averages.iter().find(|a| a.detector == detector)
    }

    pub fn failed_cells(&self) -> usize {
        self.cells
            .iter()
            .filter(|c| matches!(c, Cell::Failed(_)))
            .count()
    }

    /// Copy with every wall-clock figure set to zero, for comparing runs.
    pub fn without_timing(&self) -> Self {
        let mut out = self.clone();
        for cell in &mut out.cells {
            if let Cell::Ok(r) = cell {
                r.elapsed_seconds = Summary {
                    mean: 0.0,
                    variance: 0.0,
                    std: 0.0,
                };
            }
        }
        for avg in &mut out.averages {
            avg.elapsed_seconds = avg.elapsed_seconds.map(|_| 0.0);
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn average_rows(detectors: &[DetectorKind], cells: &[Cell]) -> Vec<AverageRow> {
    detectors
        .iter()
        .map(|&detector| {
            let reports: Vec<&EvalReport> = cells
                .iter()
                .filter(|c| c.detector() == detector)
                .filter_map(Cell::report)
                .collect();
            let mean = |f: fn(&EvalReport) -> f64| {
                (!reports.is_empty())
                    .then(|| reports.iter().map(|r| f(r)).sum::<f64>() / reports.len() as f64)
            };
            AverageRow {
                detector,
                cells: reports.len(),
                elapsed_seconds: mean(|r| r.elapsed_seconds.mean),
                accuracy: mean(|r| r.accuracy.mean),
                precision: mean(|r| r.precision.mean),
                recall: mean(|r| r.recall.mean),
                auc: mean(|r| r.auc.mean),
            }
        })
        .collect()
}

/// Runs `repetitions` seeded runs of one detector and summarises them.
pub fn evaluate(
    dataset: &str,
    kind: DetectorKind,
    data: &PointSet,
    truth: &GroundTruth,
    settings: &DetectorSettings,
    rule: DecisionRule,
    seeds: &[u64],
) -> Result<EvalReport> {
    if seeds.is_empty() {
        return Err(BenchError::Config("no repetitions requested".into()));
    }
    let mut elapsed = Vec::with_capacity(seeds.len());
    let (mut acc, mut prec, mut rec, mut auc, mut pruned) =
        (Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let (mut prec_undef, mut rec_undef) = (0, 0);

    for &seed in seeds {
        let start = Instant::now();
        let out = run_detector(kind, data, settings, seed)?;
        elapsed.push(start.elapsed().as_secs_f64());

        let pred = binarize(&out.scores, rule)?;
        let counts = confusion(&pred, truth)?;
        acc.push(counts.accuracy());
        prec.push(counts.precision());
        rec.push(counts.recall());
        prec_undef += usize::from(!counts.precision_defined());
        rec_undef += usize::from(!counts.recall_defined());
        auc.push(roc_auc(&out.scores, truth)?);
        if let Some(r) = out.prune_rate {
            pruned.push(r);
        }
    }

    Ok(EvalReport {
        dataset: dataset.to_owned(),
        detector: kind,
        seeds: seeds.to_vec(),
        elapsed_seconds: Summary::of(&elapsed),
        accuracy: Summary::of(&acc),
        precision: Summary::of(&prec),
        recall: Summary::of(&rec),
        auc: Summary::of(&auc),
        prune_rate: (!pruned.is_empty()).then(|| Summary::of(&pruned)),
        precision_undefined_runs: prec_undef,
        recall_undefined_runs: rec_undef,
        params: ParamEcho::new(kind, settings, rule, data.len()),
    })
}

/// Loads each dataset once, then evaluates every detector on it. A failing
/// cell is recorded and the run moves on; only config problems abort.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ReportBundle> {
    config.validate()?;
    let rule = config.decision_rule()?;
    let settings = DetectorSettings::from_config(config);
    let seeds: Vec<u64> = (0..config.repetitions as u64)
        .map(|r| config.seed.wrapping_add(r))
        .collect();

    let mut datasets = Vec::new();
    let mut cells = Vec::new();
    for entry in &config.datasets {
        match entry.load() {
            Ok((data, truth)) => {
                datasets.push(DatasetInfo {
                    name: entry.name.clone(),
                    points: data.len(),
                    dims: data.dims(),
                    outliers: truth.outlier_count(),
                    load_error: None,
                });
                for &kind in &config.detectors {
                    let cell = match evaluate(&entry.name, kind, &data, &truth, &settings, rule, &seeds)
                    {
                        Ok(report) => Cell::Ok(report),
                        Err(e) => Cell::Failed(FailedCell {
                            dataset: entry.name.clone(),
                            detector: kind,
                            error: e.to_string(),
                        }),
                    };
                    cells.push(cell);
                }
            }
            Err(e) => {
                let error = e.to_string();
                datasets.push(DatasetInfo {
                    name: entry.name.clone(),
                    points: 0,
                    dims: 0,
                    outliers: 0,
                    load_error: Some(error.clone()),
                });
                for &kind in &config.detectors {
                    cells.push(Cell::Failed(FailedCell {
                        dataset: entry.name.clone(),
                        detector: kind,
                        error: error.clone(),
                    }));
                }
            }
        }
    }

    let averages = average_rows(&config.detectors, &cells);
    Ok(ReportBundle {
        name: config.name.clone(),
        repetitions: config.repetitions,
        base_seed: config.seed,
        rule,
        settings,
        datasets,
        detectors: config.detectors.clone(),
        cells,
        averages,
    })
}
