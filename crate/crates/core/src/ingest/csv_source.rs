use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use csv::{ReaderBuilder, Trim};
use serde::{Deserialize, Serialize};

use crate::data::{GroundTruth, PointSet};
use crate::error::{Error, Result};

/// Column reference by 0-based position or by header name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LabelColumn {
    Index(usize),
    Name(String),
}

/// Describes one delimited-text dataset and how its labels map to outliers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    pub path: PathBuf,
    /// Single-byte field delimiter, e.g. `","`.
    pub delimiter: String,
    /// Whether the first line is a header row.
    pub header: bool,
    pub label_column: LabelColumn,
    /// Raw label values that mark an outlier.
    pub outlier_classes: Vec<String>,
    /// Columns dropped before building features (ids and the like).
    #[serde(default)]
    pub ignore_columns: Vec<LabelColumn>,
    #[serde(default)]
    pub standardize: bool,
}

impl DatasetSpec {
    /// Reads a spec from a TOML file. A relative `path` is resolved against
    /// the spec file's directory.
    pub fn from_toml_file(file: &Path) -> Result<Self> {
        let text = fs::read_to_string(file)?;
        let mut spec: DatasetSpec = toml::from_str(&text)
            .map_err(|e| Error::input(format!("{}: {e}", file.display())))?;
        spec.resolve_relative_to(file.parent().unwrap_or(Path::new(".")));
        Ok(spec)
    }

    pub fn resolve_relative_to(&mut self, dir: &Path) {
        if self.path.is_relative() {
            self.path = dir.join(&self.path);
        }
    }

    fn delimiter_byte(&self) -> Result<u8> {
        match self.delimiter.as_bytes() {
            [b] => Ok(*b),
            _ if self.delimiter == "\\t" => Ok(b'\t'),
            _ => Err(Error::input(format!(
                "delimiter must be a single byte, got {:?}",
                self.delimiter
            ))),
        }
    }
}

fn resolve_column(col: &LabelColumn, headers: Option<&csv::StringRecord>, width: usize) -> Result<usize> {
    let idx = match col {
        LabelColumn::Index(i) => *i,
        LabelColumn::Name(name) => {
            let headers = headers.ok_or_else(|| {
                Error::input(format!("column `{name}` named but the file has no header"))
            })?;
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::input(format!("no column named `{name}`")))?
        }
    };
    if idx >= width {
        return Err(Error::input(format!(
            "column {idx} out of range for {width} columns"
        )));
    }
    Ok(idx)
}

/// Loads features and binary labels. Row order follows the file.
pub fn load_csv(spec: &DatasetSpec) -> Result<(PointSet, GroundTruth)> {
    if spec.outlier_classes.is_empty() {
        return Err(Error::input("outlier_classes must not be empty"));
    }
    let mut reader = ReaderBuilder::new()
        .delimiter(spec.delimiter_byte()?)
        .has_headers(spec.header)
        .trim(Trim::All)
        .from_path(&spec.path)?;
    let headers = if spec.header {
        Some(reader.headers()?.clone())
    } else {
        None
    };

    let outliers: BTreeSet<&str> = spec.outlier_classes.iter().map(String::as_str).collect();
    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut layout: Option<(usize, Vec<usize>)> = None;

    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let (label_idx, features) = match &layout {
            Some(l) => l,
            None => {
                let width = headers.as_ref().map_or(record.len(), |h| h.len());
                let label_idx = resolve_column(&spec.label_column, headers.as_ref(), width)?;
                let ignored = spec
                    .ignore_columns
                    .iter()
                    .map(|c| resolve_column(c, headers.as_ref(), width))
                    .collect::<Result<BTreeSet<_>>>()?;
                let features = (0..width)
                    .filter(|c| *c != label_idx && !ignored.contains(c))
                    .collect();
                layout.insert((label_idx, features))
            }
        };
        labels.push(outliers.contains(&record[*label_idx]));
        for &c in features.iter() {
            let cell = &record[c];
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                row,
                column: c,
                message: format!("`{cell}` is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row,
                    column: c,
                    message: format!("`{cell}` is not finite"),
                });
            }
            values.push(v);
        }
    }

    let (_, features) = layout.ok_or_else(|| Error::input("dataset has no rows"))?;
    let points = PointSet::from_flat(labels.len(), features.len(), values)?;
    let points = if spec.standardize {
        standardize(&points)
    } else {
        points
    };
    Ok((points, GroundTruth::new(labels)))
}

/// Per-column z-scores using the population standard deviation. Constant
/// columns become all zeros.
pub fn standardize(data: &PointSet) -> PointSet {
    let n = data.len() as f64;
    let m = data.dims();
    let mut mean = vec![0.0; m];
    for row in data.rows() {
        for (acc, v) in mean.iter_mut().zip(row) {
            *acc += v;
        }
    }
    mean.iter_mut().for_each(|v| *v /= n);
    let mut var = vec![0.0; m];
    for row in data.rows() {
        for d in 0..m {
            let c = row[d] - mean[d];
            var[d] += c * c;
        }
    }
    let sd: Vec<f64> = var.iter().map(|v| (v / n).sqrt()).collect();

    let values = data
        .rows()
        .flat_map(|row| {
            (0..m).map(|d| if sd[d] > 0.0 { (row[d] - mean[d]) / sd[d] } else { 0.0 }).collect::<Vec<_>>()
        })
        .collect();
    PointSet::from_flat(data.len(), m, values).expect("standardised values stay finite")
}

/// Writes features as `x0..x{m-1}` plus a `label` column of `0`/`1`.
pub fn write_labeled_csv(path: &Path, data: &PointSet, truth: &GroundTruth) -> Result<()> {
    if data.len() != truth.len() {
        return Err(Error::input("label count does not match row count"));
    }
    let mut out = std::io::BufWriter::new(fs::File::create(path)?);
    let header: Vec<String> = (0..data.dims())
        .map(|d| format!("x{d}"))
        .chain(std::iter::once("label".to_string()))
        .collect();
    writeln!(out, "{}", header.join(","))?;
    for (i, row) in data.rows().enumerate() {
        for v in row {
            write!(out, "{v:?},")?;
        }
        writeln!(out, "{}", u8::from(truth[i]))?;
    }
    out.flush()?;
    Ok(())
}
