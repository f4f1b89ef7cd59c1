use crate::data::{l2, PointSet, ScoreVector};
use crate::error::{Error, Result};
use crate::lof::{lof_subset, MinPts};
use crate::neighbors::{Backend, NeighborIndex};

use super::kmeans::{kmeans, ClusterModel, DEFAULT_MAX_ITERS};

/// `ceil(sqrt(n))`.
pub fn default_cluster_count(n: usize) -> usize {
    (n as f64).sqrt().ceil() as usize
}

/// Distance of each point to its centroid divided by the mean such distance
/// within its cluster. A cluster whose mean distance is zero yields 0.
pub fn deviation_to_mean(data: &PointSet, model: &ClusterModel) -> Vec<f64> {
    let c = model.cluster_count();
    let dist: Vec<f64> = data
        .rows()
        .zip(&model.assignment)
        .map(|(row, &j)| l2(row, model.centroid(j)))
        .collect();
    let mut sum = vec![0.0; c];
    let mut count = vec![0usize; c];
    for (&d, &j) in dist.iter().zip(&model.assignment) {
        sum[j] += d;
        count[j] += 1;
    }
    dist.iter()
        .zip(&model.assignment)
        .map(|(&d, &j)| {
            let mean = sum[j] / count[j] as f64;
            if mean == 0.0 {
                0.0
            } else {
                d / mean
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct DevToMeanOutput {
    pub scores: ScoreVector,
    pub deviation: Vec<f64>,
    pub kept: Vec<bool>,
    pub model: ClusterModel,
}

impl DevToMeanOutput {
    pub fn prune_rate(&self) -> f64 {
        let pruned = self.kept.iter().filter(|&&k| !k).count();
        pruned as f64 / self.kept.len() as f64
    }
}

/// Cluster-then-prune LOF: k-means, prune points with deviation at or below
/// the threshold, then score the rest with full-dataset neighbourhoods.
#[derive(Debug, Clone, Copy)]
pub struct DevToMean {
    pub minpts: MinPts,
    /// `None` means `ceil(sqrt(n))`.
    pub clusters: Option<usize>,
    /// A threshold of `0` disables pruning.
    pub threshold: f64,
    pub max_iters: usize,
    pub backend: Backend,
}

impl DevToMean {
    pub fn new(minpts: MinPts) -> Self {
        Self {
            minpts,
            clusters: None,
            threshold: 1.0,
            max_iters: DEFAULT_MAX_ITERS,
            backend: Backend::default(),
        }
    }

    pub fn run(&self, data: &PointSet, seed: u64) -> Result<DevToMeanOutput> {
        if !(self.threshold >= 0.0 && self.threshold.is_finite()) {
            return Err(Error::input(format!(
                "prune threshold must be finite and non-negative, got {}",
                self.threshold
            )));
        }
        self.minpts.check_for(data.len())?;
        let c = self
            .clusters
            .unwrap_or_else(|| default_cluster_count(data.len()));
        let model = kmeans(data, c, seed, self.max_iters)?;
        let deviation = deviation_to_mean(data, &model);
        let kept: Vec<bool> = if self.threshold == 0.0 {
            vec![true; data.len()]
        } else {
            deviation.iter().map(|&d| d > self.threshold).collect()
        };

        let index = NeighborIndex::build(data, self.backend)?;
        let nbhd = index.neighborhoods(self.minpts.get())?;
        let scores = lof_subset(&nbhd, &kept)?;
        Ok(DevToMeanOutput {
            scores,
            deviation,
            kept,
            model,
        })
    }
}

pub fn devtomean_scores(
    data: &PointSet,
    minpts: MinPts,
    clusters: usize,
    threshold: f64,
    seed: u64,
    backend: Backend,
) -> Result<ScoreVector> {
    let detector = DevToMean {
        clusters: Some(clusters),
        threshold,
        backend,
        ..DevToMean::new(minpts)
    };
    detector.run(data, seed).map(|o| o.scores)
}
