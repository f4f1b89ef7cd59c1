//! Local outlier factor over cached k-distance neighbourhoods.
//!
//! The scoring entry point [`lof_subset`] computes scores only for a
//! requested subset of points while still using every point as a potential
//! neighbour. Local reachability densities are filled in lazily for exactly
//! the points that the requested scores depend on.

use serde::{Deserialize, Serialize};

use crate::data::{PointSet, ScoreVector};
use crate::error::{Error, Result};
use crate::neighbors::{Backend, NeighborIndex, Neighborhoods};

/// Neighbourhood size used by every density computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MinPts(usize);

impl MinPts {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::input("MinPts must be at least 1"));
        }
        Ok(Self(k))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Checks `1 <= k <= n - 1`.
    pub fn check_for(self, n: usize) -> Result<()> {
        if self.0 >= n {
            return Err(Error::input(format!(
                "MinPts {} needs at least {} points, got {n}",
                self.0,
                self.0 + 1
            )));
        }
        Ok(())
    }
}

#[inline]
fn reach(k_distance_o: f64, d: f64) -> f64 {
    if d > k_distance_o {
        d
    } else {
        k_distance_o
    }
}

/// Reachability distance of `p` with respect to `o`: `max(k-distance(o), d(p, o))`.
pub fn reach_dist(nbhd: &Neighborhoods<'_>, p: usize, o: usize) -> Result<f64> {
    let n = nbhd.len();
    if p >= n || o >= n {
        return Err(Error::input(format!("unknown point id in ({p}, {o})")));
    }
    if p == o {
        return Err(Error::input("reachability distance of a point to itself"));
    }
    Ok(reach(nbhd.k_distance(o), nbhd.data().distance(p, o)))
}

/// Local reachability density of `p`; infinite when every reachability
/// distance in its neighbourhood is zero.
pub fn lrd(nbhd: &Neighborhoods<'_>, p: usize) -> f64 {
    let profile = nbhd.profile(p);
    let sum: f64 = profile
        .neighborhood
        .iter()
        .map(|o| reach(nbhd.k_distance(o.id), o.distance))
        .sum();
    if sum == 0.0 {
        f64::INFINITY
    } else {
        profile.len() as f64 / sum
    }
}

/// Lazily populated local reachability densities.
#[derive(Debug, Clone, PartialEq)]
pub struct LrdCache {
    values: Vec<Option<f64>>,
}

impl LrdCache {
    pub fn empty(n: usize) -> Self {
        Self {
            values: vec![None; n],
        }
    }

    /// Fills the cache for every point flagged in `demand`.
    pub fn populate(nbhd: &Neighborhoods<'_>, demand: &[bool]) -> Self {
        let values = demand
            .iter()
            .enumerate()
            .map(|(p, &needed)| needed.then(|| lrd(nbhd, p)))
            .collect();
        Self { values }
    }

    pub fn get(&self, p: usize) -> Option<f64> {
        self.values.get(p).copied().flatten()
    }

    pub fn insert(&mut self, p: usize, value: f64) {
        self.values[p] = Some(value);
    }

    /// Number of points with a computed density.
    pub fn filled(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }
}

/// Points whose density the scores of `scored` depend on: the scored points
/// and every member of their neighbourhoods.
pub fn lrd_demand(nbhd: &Neighborhoods<'_>, scored: &[bool]) -> Vec<bool> {
    let mut demand = scored.to_vec();
    for (p, _) in scored.iter().enumerate().filter(|(_, &s)| s) {
        for o in nbhd.profile(p).ids() {
            demand[o] = true;
        }
    }
    demand
}

// lrd(o) / lrd(p) with the usual conventions for infinite densities.
#[inline]
fn density_ratio(lrd_o: f64, lrd_p: f64) -> f64 {
    match (lrd_o.is_infinite(), lrd_p.is_infinite()) {
        (true, true) => 1.0,
        (false, true) => 0.0,
        (true, false) => f64::INFINITY,
        (false, false) => lrd_o / lrd_p,
    }
}

/// LOF of `p`: the mean ratio of its neighbours' densities to its own.
pub fn lof_score(nbhd: &Neighborhoods<'_>, cache: &LrdCache, p: usize) -> Result<f64> {
    let missing = |id: usize| Error::Internal(format!("no cached density for point {id}"));
    let lrd_p = cache.get(p).ok_or_else(|| missing(p))?;
    let profile = nbhd.profile(p);
    let mut sum = 0.0;
    for o in profile.ids() {
        let lrd_o = cache.get(o).ok_or_else(|| missing(o))?;
        sum += density_ratio(lrd_o, lrd_p);
    }
    Ok(sum / profile.len() as f64)
}

/// Scores the points flagged in `scored`; every other entry is `0.0`.
pub fn lof_subset(nbhd: &Neighborhoods<'_>, scored: &[bool]) -> Result<ScoreVector> {
    if scored.len() != nbhd.len() {
        return Err(Error::input(format!(
            "mask of length {} for {} points",
            scored.len(),
            nbhd.len()
        )));
    }
    let cache = LrdCache::populate(nbhd, &lrd_demand(nbhd, scored));
    let scores = scored
        .iter()
        .enumerate()
        .map(|(p, &s)| if s { lof_score(nbhd, &cache, p) } else { Ok(0.0) })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScoreVector::new(scores))
}

/// LOF score of every point.
pub fn lof_all(data: &PointSet, minpts: MinPts, backend: Backend) -> Result<ScoreVector> {
    minpts.check_for(data.len())?;
    let index = NeighborIndex::build(data, backend)?;
    let nbhd = index.neighborhoods(minpts.get())?;
    lof_subset(&nbhd, &vec![true; data.len()])
}
