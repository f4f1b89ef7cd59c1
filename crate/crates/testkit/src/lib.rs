//! Slow, direct reference computations for checking the `plof` crate.
//!
//! Nothing here shares code with `plof`: every quantity is computed from a
//! full pairwise distance matrix, straight from the textbook definitions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Rows = Vec<Vec<f64>>;

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

pub fn distance_matrix(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|a| rows.iter().map(|b| distance(a, b)).collect())
        .collect()
}

/// Every intermediate of the LOF computation.
#[derive(Debug, Clone)]
pub struct NaiveLof {
    pub dist: Vec<Vec<f64>>,
    pub k_distance: Vec<f64>,
    /// Ids of all other points within the k-distance, ascending by id.
    pub neighborhood: Vec<Vec<usize>>,
    pub lrd: Vec<f64>,
    pub lof: Vec<f64>,
}

impl NaiveLof {
    pub fn new(rows: &[Vec<f64>], k: usize) -> Self {
        let n = rows.len();
        let dist = distance_matrix(rows);

        let mut k_distance = Vec::with_capacity(n);
        let mut neighborhood = Vec::with_capacity(n);
        for p in 0..n {
            let mut others: Vec<f64> = (0..n).filter(|&o| o != p).map(|o| dist[p][o]).collect();
            others.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let kd = others[k - 1];
            k_distance.push(kd);
            neighborhood.push((0..n).filter(|&o| o != p && dist[p][o] <= kd).collect::<Vec<_>>());
        }

        let lrd: Vec<f64> = (0..n)
            .map(|p| {
                let total: f64 = neighborhood[p]
                    .iter()
                    .map(|&o| f64::max(k_distance[o], dist[p][o]))
                    .sum();
                if total == 0.0 {
                    f64::INFINITY
                } else {
                    neighborhood[p].len() as f64 / total
                }
            })
            .collect();

        let lof = (0..n)
            .map(|p| {
                let total: f64 = neighborhood[p]
                    .iter()
                    .map(|&o| {
                        if lrd[p].is_infinite() {
                            if lrd[o].is_infinite() {
                                1.0
                            } else {
                                0.0
                            }
                        } else {
                            lrd[o] / lrd[p]
                        }
                    })
                    .sum();
                total / neighborhood[p].len() as f64
            })
            .collect();

        Self {
            dist,
            k_distance,
            neighborhood,
            lrd,
            lof,
        }
    }

    /// `|M|^2 / sum of distances to M` over the k-distance neighbourhood.
    pub fn delta(&self, p: usize) -> f64 {
        let m = self.neighborhood[p].len() as f64;
        let total: f64 = self.neighborhood[p].iter().map(|&o| self.dist[p][o]).sum();
        if total == 0.0 {
            f64::INFINITY
        } else {
            m * m / total
        }
    }
}

/// AUC by enumerating every (outlier, inlier) pair.
pub fn pair_count_auc(scores: &[f64], outlier: &[bool]) -> f64 {
    let mut doubled: u64 = 0;
    let mut pairs: u64 = 0;
    for i in (0..scores.len()).filter(|&i| outlier[i]) {
        for j in (0..scores.len()).filter(|&j| !outlier[j]) {
            pairs += 1;
            if scores[i] > scores[j] {
                doubled += 2;
            } else if scores[i] == scores[j] {
                doubled += 1;
            }
        }
    }
    doubled as f64 / (2 * pairs) as f64
}

/// Median by full sort, mean of the middle pair for even lengths.
pub fn sorted_median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

#[derive(Debug, Clone)]
pub struct FuzzCase {
    pub rows: Rows,
    pub minpts: usize,
}

/// How fuzzed coordinates are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Texture {
    /// Gaussian blobs plus uniform noise; ties have probability zero.
    Continuous,
    /// Small-integer grid coordinates: many exact ties and duplicates.
    Lattice,
}

pub fn random_rows(rng: &mut ChaCha8Rng, n: usize, m: usize, texture: Texture) -> Rows {
    match texture {
        Texture::Lattice => (0..n)
            .map(|_| (0..m).map(|_| f64::from(rng.random_range(0..5))).collect())
            .collect(),
        Texture::Continuous => {
            let blobs = rng.random_range(1..=4);
            let centers: Rows = (0..blobs)
                .map(|_| (0..m).map(|_| rng.random_range(-20.0..20.0)).collect())
                .collect();
            let spreads: Vec<f64> = (0..blobs).map(|_| rng.random_range(0.2..3.0)).collect();
            (0..n)
                .map(|_| {
                    if rng.random_bool(0.1) {
                        (0..m).map(|_| rng.random_range(-30.0..30.0)).collect()
                    } else {
                        let b = rng.random_range(0..blobs);
                        (0..m)
                            .map(|d| centers[b][d] + spreads[b] * approx_normal(rng))
                            .collect()
                    }
                })
                .collect()
        }
    }
}

// Irwin-Hall approximation; good enough for shaping test data.
fn approx_normal(rng: &mut ChaCha8Rng) -> f64 {
    (0..12).map(|_| rng.random::<f64>()).sum::<f64>() - 6.0
}

/// Deterministic corpus with `n` in `n_range`, `m` in `m_range` and MinPts
/// drawn from `minpts_choices` (clamped below `n`).
pub fn fuzz_corpus(
    seed: u64,
    count: usize,
    n_range: std::ops::RangeInclusive<usize>,
    m_range: std::ops::RangeInclusive<usize>,
    minpts_choices: &[usize],
    texture: Texture,
) -> Vec<FuzzCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(n_range.clone());
            let m = rng.random_range(m_range.clone());
            let minpts = minpts_choices[rng.random_range(0..minpts_choices.len())].min(n - 1);
            FuzzCase {
                rows: random_rows(&mut rng, n, m, texture),
                minpts,
            }
        })
        .collect()
}
