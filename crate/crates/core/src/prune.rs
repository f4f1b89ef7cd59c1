//! Prune-based LOF.
//!
//! Every point first gets a cheap density estimate
//!
//! ```text
//! delta(p) = |M|^2 / sum_{i in M} d(p, i)
//! ```
//!
//! where `M` is the tie-inclusive k-distance neighbourhood of `p`. One
//! largest and one smallest delta are set aside, the median of the rest
//! becomes the threshold, and points denser than the median receive a score
//! of `0` without any LOF work. The remaining points get their exact LOF
//! score; pruned points still act as their neighbours.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{PointSet, ScoreVector};
use crate::error::{Error, Result};
use crate::lof::{lof_subset, MinPts};
use crate::neighbors::{Backend, NeighborIndex, Neighborhoods};

/// Which side of the median is skipped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PruneRule {
    /// Skip points with delta above the median (dense points).
    #[default]
    HighDelta,
    /// Skip points with delta below the median.
    LowDelta,
}

impl fmt::Display for PruneRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PruneRule::HighDelta => "high-delta",
            PruneRule::LowDelta => "low-delta",
        })
    }
}

impl FromStr for PruneRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "high-delta" => Ok(PruneRule::HighDelta),
            "low-delta" => Ok(PruneRule::LowDelta),
            other => Err(Error::input(format!("unknown prune rule `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaVector(Vec<f64>);

impl DeltaVector {
    pub fn new(deltas: Vec<f64>) -> Self {
        Self(deltas)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PruneMask {
    /// `true` where the LOF score is computed.
    pub kept: Vec<bool>,
    pub median_delta: f64,
    pub eliminated_max: usize,
    pub eliminated_min: usize,
}

impl PruneMask {
    pub fn kept_count(&self) -> usize {
        self.kept.iter().filter(|&&k| k).count()
    }

    pub fn is_pruned(&self, p: usize) -> bool {
        !self.kept[p]
    }
}

/// Density estimate of one point from its cached neighbourhood.
pub fn delta_density(nbhd: &Neighborhoods<'_>, p: usize) -> f64 {
    let profile = nbhd.profile(p);
    let sum: f64 = profile.neighborhood.iter().map(|n| n.distance).sum();
    if sum == 0.0 {
        return f64::INFINITY;
    }
    let size = profile.len() as f64;
    size * size / sum
}

pub fn delta_vector(nbhd: &Neighborhoods<'_>) -> DeltaVector {
    DeltaVector((0..nbhd.len()).map(|p| delta_density(nbhd, p)).collect())
}

/// Builds the mask with the default rule (dense points pruned).
pub fn prune_mask(deltas: &DeltaVector) -> Result<PruneMask> {
    prune_mask_with(deltas, PruneRule::HighDelta)
}

pub fn prune_mask_with(deltas: &DeltaVector, rule: PruneRule) -> Result<PruneMask> {
    let d = deltas.as_slice();
    let n = d.len();
    if n <= 4 {
        return Err(Error::input(format!(
            "pruning needs more than 4 points, got {n}"
        )));
    }
    if let Some(i) = d.iter().position(|v| v.is_nan() || *v <= 0.0) {
        return Err(Error::input(format!("delta[{i}] = {} is not positive", d[i])));
    }

    // First occurrence of the maximum, then first occurrence of the minimum
    // among the other points.
    let mut eliminated_max = 0;
    for i in 1..n {
        if d[i] > d[eliminated_max] {
            eliminated_max = i;
        }
    }
    let mut eliminated_min = usize::from(eliminated_max == 0);
    for i in 0..n {
        if i != eliminated_max && d[i] < d[eliminated_min] {
            eliminated_min = i;
        }
    }

    let mut rest: Vec<f64> = d
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != eliminated_max && i != eliminated_min)
        .map(|(_, &v)| v)
        .collect();
    let median_delta = median(&mut rest);

    let kept = d
        .iter()
        .map(|&v| match rule {
            PruneRule::HighDelta => v <= median_delta,
            PruneRule::LowDelta => v >= median_delta,
        })
        .collect();
    Ok(PruneMask {
        kept,
        median_delta,
        eliminated_max,
        eliminated_min,
    })
}

// Mean of the two middle values for even lengths. `values` is non-empty.
fn median(values: &mut [f64]) -> f64 {
    let len = values.len();
    let mid = len / 2;
    let (lower, upper, _) = values.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if len % 2 == 1 {
        upper
    } else {
        let below = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if below == upper {
            upper
        } else {
            below / 2.0 + upper / 2.0
        }
    }
}

/// Fraction of points that were pruned.
pub fn prune_rate(mask: &PruneMask) -> f64 {
    if mask.kept.is_empty() {
        return 0.0;
    }
    (mask.kept.len() - mask.kept_count()) as f64 / mask.kept.len() as f64
}

#[derive(Debug, Clone)]
pub struct PlofOutput {
    pub scores: ScoreVector,
    pub deltas: DeltaVector,
    pub mask: PruneMask,
}

/// Prune-based LOF detector.
#[derive(Debug, Clone, Copy)]
pub struct Plof {
    pub minpts: MinPts,
    pub backend: Backend,
    pub rule: PruneRule,
}

impl Plof {
    pub fn new(minpts: MinPts) -> Self {
        Self {
            minpts,
            backend: Backend::default(),
            rule: PruneRule::default(),
        }
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn with_rule(mut self, rule: PruneRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn run(&self, data: &PointSet) -> Result<PlofOutput> {
        if data.len() <= 4 {
            return Err(Error::input(format!(
                "pruning needs more than 4 points, got {}",
                data.len()
            )));
        }
        self.minpts.check_for(data.len())?;
        let index = NeighborIndex::build(data, self.backend)?;
        let nbhd = index.neighborhoods(self.minpts.get())?;
        self.run_on(&nbhd)
    }

    /// Runs on precomputed neighbourhoods.
    pub fn run_on(&self, nbhd: &Neighborhoods<'_>) -> Result<PlofOutput> {
        let deltas = delta_vector(nbhd);
        let mask = prune_mask_with(&deltas, self.rule)?;
        let scores = lof_subset(nbhd, &mask.kept)?;
        Ok(PlofOutput {
            scores,
            deltas,
            mask,
        })
    }
}

pub fn plof_scores(data: &PointSet, minpts: MinPts, backend: Backend) -> Result<ScoreVector> {
    Ok(Plof::new(minpts).with_backend(backend).run(data)?.scores)
}
