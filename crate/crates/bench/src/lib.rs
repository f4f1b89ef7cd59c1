//! Experiment harness for the `plof` detectors: runs each detector several
//! times per dataset, times it, averages the metrics and writes tables,
//! reports, score files and 2-D projections.

pub mod config;
mod error;
pub mod experiment;
pub mod projection;
pub mod tables;

use std::fs;
use std::path::Path;

use plof::ScoreVector;

pub use config::{DatasetEntry, DatasetSource, DetectorKind, ExperimentConfig};
pub use error::{BenchError, Result};
pub use experiment::{run_experiment, ReportBundle};
pub use projection::project_2pc;
pub use tables::{emit_tables, render_table, Metric, TableFormat};

/// Writes scores as `id,score`, one point per line.
pub fn write_scores(path: &Path, scores: &ScoreVector) -> Result<()> {
    let mut out = String::from("id,score\n");
    for (i, s) in scores.iter().enumerate() {
        out.push_str(&format!("{i},{s:?}\n"));
    }
    fs::write(path, out).map_err(|source| BenchError::Output {
        path: path.to_owned(),
        source,
    })
}
