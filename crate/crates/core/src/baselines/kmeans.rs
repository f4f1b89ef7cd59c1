use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{l2, PointSet};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_ITERS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterModel {
    /// Row-major `c × m` centroids.
    pub centroids: Vec<f64>,
    pub dims: usize,
    pub assignment: Vec<usize>,
    pub seed: u64,
    pub iterations: usize,
    /// Inertia after each assignment step.
    pub inertia_history: Vec<f64>,
}

impl ClusterModel {
    pub fn cluster_count(&self) -> usize {
        self.centroids.len() / self.dims
    }

    pub fn centroid(&self, j: usize) -> &[f64] {
        &self.centroids[j * self.dims..(j + 1) * self.dims]
    }

    pub fn inertia(&self) -> f64 {
        self.inertia_history.last().copied().unwrap_or(0.0)
    }
}

/// Lloyd's algorithm seeded with `c` distinct rows drawn under `seed`.
///
/// Iterates until the assignment stops changing or `max_iters` updates have
/// run. A cluster that loses all its points keeps its previous centroid.
pub fn kmeans(data: &PointSet, c: usize, seed: u64, max_iters: usize) -> Result<ClusterModel> {
    let n = data.len();
    let m = data.dims();
    if c == 0 || c > n {
        return Err(Error::input(format!(
            "cluster count must be in 1..={n}, got {c}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut init = sample(&mut rng, n, c).into_vec();
    init.sort_unstable();
    let mut centroids: Vec<f64> = init.iter().flat_map(|&i| data.row(i).to_vec()).collect();

    let mut assignment = vec![usize::MAX; n];
    let mut inertia_history = Vec::new();
    let mut iterations = 0;
    loop {
        let mut changed = false;
        let mut inertia = 0.0;
        for (i, row) in data.rows().enumerate() {
            let (best, dist) = nearest(&centroids, m, row);
            inertia += dist * dist;
            if assignment[i] != best {
                assignment[i] = best;
                changed = true;
            }
        }
        inertia_history.push(inertia);
        if !changed || iterations == max_iters {
            break;
        }
        iterations += 1;

        let mut sums = vec![0.0; c * m];
        let mut counts = vec![0usize; c];
        for (row, &j) in data.rows().zip(&assignment) {
            counts[j] += 1;
            for (s, v) in sums[j * m..(j + 1) * m].iter_mut().zip(row) {
                *s += v;
            }
        }
        for j in 0..c {
            if counts[j] > 0 {
                for d in 0..m {
                    centroids[j * m + d] = sums[j * m + d] / counts[j] as f64;
                }
            }
        }
    }

    Ok(ClusterModel {
        centroids,
        dims: m,
        assignment,
        seed,
        iterations,
        inertia_history,
    })
}

// Lowest-index centroid among equals.
fn nearest(centroids: &[f64], m: usize, row: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centroids.chunks_exact(m).enumerate() {
        let d = l2(row, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cluster_is_the_mean() {
        let data = PointSet::from_rows(&[[0.0, 1.0], [2.0, 3.0], [4.0, 8.0]]).unwrap();
        let model = kmeans(&data, 1, 9, DEFAULT_MAX_ITERS).unwrap();
        assert_eq!(model.centroid(0), &[2.0, 4.0]);
        assert!(model.assignment.iter().all(|&a| a == 0));
    }

    #[test]
    fn every_point_its_own_cluster() {
        let data = PointSet::from_rows(&[[0.0], [1.0], [5.0], [-3.0]]).unwrap();
        let model = kmeans(&data, 4, 1, DEFAULT_MAX_ITERS).unwrap();
        assert_eq!(model.inertia(), 0.0);
        let mut seen = model.assignment.clone();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), 4);
    }

    #[test]
    fn too_many_clusters_rejected() {
        let data = PointSet::from_rows(&[[0.0], [1.0]]).unwrap();
        assert!(kmeans(&data, 3, 0, 10).is_err());
        assert!(kmeans(&data, 0, 0, 10).is_err());
    }

    #[test]
    fn same_seed_same_model() {
        let rows: Vec<[f64; 2]> = (0..40)
            .map(|i| [f64::from(i % 7), f64::from((i * 13) % 11)])
            .collect();
        let data = PointSet::from_rows(&rows).unwrap();
        assert_eq!(
            kmeans(&data, 4, 77, DEFAULT_MAX_ITERS).unwrap(),
            kmeans(&data, 4, 77, DEFAULT_MAX_ITERS).unwrap()
        );
    }
}
