//! Result tables: one per metric, datasets as rows, detectors as columns,
//! closed by an Average row.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::experiment::{AverageRow, EvalReport, ReportBundle};
use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    ExecutionTime,
    Accuracy,
    Precision,
    Auc,
    Recall,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::ExecutionTime,
        Metric::Accuracy,
        Metric::Precision,
        Metric::Auc,
        Metric::Recall,
    ];

    pub fn title(self) -> &'static str {
        match self {
            Metric::ExecutionTime => "The execution time",
            Metric::Accuracy => "The accuracy",
            Metric::Precision => "The precision",
            Metric::Auc => "The AUC",
            Metric::Recall => "The recall",
        }
    }

    pub fn file_stem(self) -> &'static str {
        match self {
            Metric::ExecutionTime => "execution_time",
            Metric::Accuracy => "accuracy",
            Metric::Precision => "precision",
            Metric::Auc => "auc",
            Metric::Recall => "recall",
        }
    }

    fn of_report(self, r: &EvalReport) -> f64 {
        match self {
            Metric::ExecutionTime => r.elapsed_seconds.mean,
            Metric::Accuracy => r.accuracy.mean,
            Metric::Precision => r.precision.mean,
            Metric::Auc => r.auc.mean,
            Metric::Recall => r.recall.mean,
        }
    }

    fn of_average(self, a: &AverageRow) -> Option<f64> {
        match self {
            Metric::ExecutionTime => a.elapsed_seconds,
            Metric::Accuracy => a.accuracy,
            Metric::Precision => a.precision,
            Metric::Auc => a.auc,
            Metric::Recall => a.recall,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Text,
    Delimited,
    Structured,
}

impl fmt::Display for TableFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TableFormat::Text => "text",
            TableFormat::Delimited => "delimited",
            TableFormat::Structured => "structured",
        })
    }
}

impl FromStr for TableFormat {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(TableFormat::Text),
            "delimited" | "csv" => Ok(TableFormat::Delimited),
            "structured" | "json" => Ok(TableFormat::Structured),
            other => Err(BenchError::Config(format!("unknown table format `{other}`"))),
        }
    }
}

/// Table contents before formatting: `None` marks a failed cell.
pub struct TableData {
    pub metric: Metric,
    pub columns: Vec<String>,
    pub rows: Vec<(String, Vec<Option<f64>>)>,
    pub average: Vec<Option<f64>>,
}

pub fn table_data(bundle: &ReportBundle, metric: Metric) -> TableData {
    let rows = bundle
        .datasets
        .iter()
        .map(|d| {
            let values = bundle
                .detectors
                .iter()
                .map(|&det| {
                    bundle
                        .cell(&d.name, det)
                        .and_then(|c| c.report())
                        .map(|r| metric.of_report(r))
                })
                .collect();
            (d.name.clone(), values)
        })
        .collect();
    let average = bundle
        .detectors
        .iter()
        .map(|&det| bundle.average(det).and_then(|a| metric.of_average(a)))
        .collect();
    TableData {
        metric,
        columns: bundle
            .detectors
            .iter()
            .map(|d| d.display_name().to_owned())
            .collect(),
        rows,
        average,
    }
}

/// Fixed-width table with three decimals, as in the published tables.
pub fn render_table(bundle: &ReportBundle, metric: Metric) -> String {
    let t = table_data(bundle, metric);
    let cell = |v: &Option<f64>| v.map_or_else(|| "-".to_owned(), |x| format!("{x:.3}"));

    let mut body: Vec<(String, Vec<String>)> = t
        .rows
        .iter()
        .map(|(name, vals)| (name.clone(), vals.iter().map(cell).collect()))
        .collect();
    body.push(("Average".to_owned(), t.average.iter().map(cell).collect()));

    let first = body
        .iter()
        .map(|(n, _)| n.chars().count())
        .chain(["Dataset".len()])
        .max()
        .unwrap_or(0);
    let widths: Vec<usize> = t
        .columns
        .iter()
        .enumerate()
        .map(|(j, h)| {
            body.iter()
                .map(|(_, v)| v[j].len())
                .chain([h.chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let total = first + widths.iter().map(|w| w + 2).sum::<usize>();
    let rule = "-".repeat(total);

    let line = |name: &str, vals: &[String]| {
        let mut s = format!("{name:<first$}");
        for (v, w) in vals.iter().zip(&widths) {
            let _ = write!(s, "  {v:>w$}");
        }
        s
    };

    let mut out = String::new();
    let _ = writeln!(out, "{}", metric.title());
    let _ = writeln!(out, "{rule}");
    let _ = writeln!(out, "{}", line("Dataset", &t.columns));
    let _ = writeln!(out, "{rule}");
    let (avg, rows) = body.split_last().expect("average row is always present");
    for (name, vals) in rows {
        let _ = writeln!(out, "{}", line(name, vals));
    }
    let _ = writeln!(out, "{rule}");
    let _ = writeln!(out, "{}", line(&avg.0, &avg.1));
    let _ = writeln!(out, "{rule}");
    out
}

/// All five tables, separated by blank lines.
pub fn render_all(bundle: &ReportBundle) -> String {
    Metric::ALL
        .iter()
        .map(|&m| render_table(bundle, m))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Comma-separated table at full precision; failed cells are empty.
pub fn render_delimited(bundle: &ReportBundle, metric: Metric) -> Result<String> {
    let t = table_data(bundle, metric);
    let mut w = csv::Writer::from_writer(Vec::new());
    let field = |v: &Option<f64>| v.map_or_else(String::new, |x| x.to_string());
    let io = |e: csv::Error| BenchError::Config(e.to_string());

    w.write_record(std::iter::once("dataset".to_owned()).chain(t.columns.iter().cloned()))
        .map_err(io)?;
    for (name, vals) in &t.rows {
        w.write_record(std::iter::once(name.clone()).chain(vals.iter().map(field)))
            .map_err(io)?;
    }
    w.write_record(std::iter::once("Average".to_owned()).chain(t.average.iter().map(field)))
        .map_err(io)?;
    let bytes = w.into_inner().map_err(|e| BenchError::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn write_file(path: PathBuf, contents: &str) -> Result<PathBuf> {
    fs::write(&path, contents).map_err(|source| BenchError::Output {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

/// Writes the bundle to `dir` in one format and returns the files written:
/// `tables.txt`, one `<metric>.csv` per metric, or `report.json`.
pub fn emit_tables(bundle: &ReportBundle, format: TableFormat, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|source| BenchError::Output {
        path: dir.to_owned(),
        source,
    })?;
    match format {
        TableFormat::Text => Ok(vec![write_file(dir.join("tables.txt"), &render_all(bundle))?]),
        TableFormat::Delimited => Metric::ALL
            .iter()
            .map(|&m| {
                write_file(
                    dir.join(format!("{}.csv", m.file_stem())),
                    &render_delimited(bundle, m)?,
                )
            })
            .collect(),
        TableFormat::Structured => Ok(vec![write_file(dir.join("report.json"), &bundle.to_json()?)?]),
    }
}
