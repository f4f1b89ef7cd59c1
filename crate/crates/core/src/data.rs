//! Dataset, label and score containers shared by every detector.

use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense, row-major N×m matrix of finite feature values.
///
/// Rows are addressed by their position (`0..N`); every per-point output in
/// this crate is aligned to that order.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    values: Vec<f64>,
    n: usize,
    m: usize,
}

impl PointSet {
    /// Builds a point set from a flat row-major buffer.
    pub fn from_flat(n: usize, m: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::input(format!(
                "point set needs at least one row and one column, got {n}x{m}"
            )));
        }
        if values.len() != n * m {
            return Err(Error::input(format!(
                "buffer of {} values does not match {n}x{m}",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::input(format!(
                "non-finite feature value at row {}, column {}",
                pos / m,
                pos % m
            )));
        }
        Ok(Self { values, n, m })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let m = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut values = Vec::with_capacity(rows.len() * m);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != m {
                return Err(Error::input(format!(
                    "row {i} has {} columns, expected {m}",
                    row.len()
                )));
            }
            values.extend_from_slice(row);
        }
        Self::from_flat(rows.len(), m, values)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dims(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.m..(i + 1) * self.m]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.m)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.values
    }

    /// Copies the given rows, in the given order, into a new point set.
    pub fn select(&self, ids: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(ids.len() * self.m);
        for &id in ids {
            if id >= self.n {
                return Err(Error::input(format!("unknown point id {id}")));
            }
            values.extend_from_slice(self.row(id));
        }
        Self::from_flat(ids.len(), self.m, values)
    }

    /// Distance between two rows of this set.
    #[inline]
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        l2(self.row(a), self.row(b))
    }
}

/// Binary ground truth, `true` marking an outlier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth(Vec<bool>);

impl GroundTruth {
    pub fn new(labels: Vec<bool>) -> Self {
        Self(labels)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn outlier_count(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// True when both classes are present.
    pub fn has_both_classes(&self) -> bool {
        let pos = self.outlier_count();
        pos > 0 && pos < self.0.len()
    }
}

impl Index<usize> for GroundTruth {
    type Output = bool;

    fn index(&self, i: usize) -> &bool {
        &self.0[i]
    }
}

/// Per-point outlierness. `0.0` marks a pruned point; `f64::INFINITY` is allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreVector(Vec<f64>);

impl ScoreVector {
    pub fn new(scores: Vec<f64>) -> Self {
        Self(scores)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    /// Index of the highest score; ties resolve to the lowest index.
    pub fn argmax(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, s) in self.0.iter().enumerate() {
            match best {
                Some(b) if self.0[b] >= *s => {}
                _ => best = Some(i),
            }
        }
        best
    }
}

impl Index<usize> for ScoreVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Euclidean distance between two feature rows.
pub fn euclidean(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::input(format!(
            "dimension mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(l2(a, b))
}

// Every distance in the crate goes through here so that the brute-force and
// tree backends agree bit for bit.
#[inline]
pub(crate) fn l2(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
    }
    acc.sqrt()
}
