use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::data::{GroundTruth, PointSet};
use crate::error::{Error, Result};

// Cluster centres are drawn uniformly from [-CENTER_RANGE, CENTER_RANGE]^m.
const CENTER_RANGE: f64 = 10.0;

/// Gaussian blobs of inliers plus uniformly scattered outliers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub n_inliers: usize,
    pub n_outliers: usize,
    pub dims: usize,
    #[serde(default = "default_clusters")]
    pub cluster_count: usize,
    /// Per-dimension standard deviation of each blob.
    #[serde(default = "default_spread")]
    pub cluster_spread: f64,
    /// Outliers are drawn from the inliers' bounding box scaled about its
    /// centre by this factor.
    #[serde(default = "default_box_scale")]
    pub outlier_box_scale: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_clusters() -> usize {
    2
}

fn default_spread() -> f64 {
    1.0
}

fn default_box_scale() -> f64 {
    1.5
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n_inliers: 950,
            n_outliers: 50,
            dims: 2,
            cluster_count: default_clusters(),
            cluster_spread: default_spread(),
            outlier_box_scale: default_box_scale(),
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_outliers == 0 {
            return Err(Error::input("n_outliers must be positive"));
        }
        if self.n_outliers >= self.n_inliers {
            return Err(Error::input("n_outliers must be smaller than n_inliers"));
        }
        if self.dims == 0 || self.cluster_count == 0 {
            return Err(Error::input("dims and cluster_count must be positive"));
        }
        if !(self.cluster_spread > 0.0 && self.cluster_spread.is_finite()) {
            return Err(Error::input("cluster_spread must be positive"));
        }
        if !(self.outlier_box_scale > 0.0 && self.outlier_box_scale.is_finite()) {
            return Err(Error::input("outlier_box_scale must be positive"));
        }
        Ok(())
    }
}

/// Inliers come first (cycling through the blobs), then the outliers.
pub fn make_synthetic(spec: &SyntheticSpec) -> Result<(PointSet, GroundTruth)> {
    spec.validate()?;
    let m = spec.dims;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let centers: Vec<f64> = (0..spec.cluster_count * m)
        .map(|_| rng.random_range(-CENTER_RANGE..=CENTER_RANGE))
        .collect();
    let noise = Normal::new(0.0, spec.cluster_spread)
        .map_err(|e| Error::input(format!("cluster_spread: {e}")))?;

    let n = spec.n_inliers + spec.n_outliers;
    let mut values = Vec::with_capacity(n * m);
    let mut lo = vec![f64::INFINITY; m];
    let mut hi = vec![f64::NEG_INFINITY; m];
    for i in 0..spec.n_inliers {
        let c = i % spec.cluster_count;
        for d in 0..m {
            let v = centers[c * m + d] + noise.sample(&mut rng);
            lo[d] = lo[d].min(v);
            hi[d] = hi[d].max(v);
            values.push(v);
        }
    }
    for _ in 0..spec.n_outliers {
        for d in 0..m {
            let mid = (lo[d] + hi[d]) / 2.0;
            let half = (hi[d] - lo[d]) / 2.0 * spec.outlier_box_scale;
            values.push(rng.random_range(mid - half..=mid + half));
        }
    }

    let labels = (0..n).map(|i| i >= spec.n_inliers).collect();
    Ok((PointSet::from_flat(n, m, values)?, GroundTruth::new(labels)))
}
