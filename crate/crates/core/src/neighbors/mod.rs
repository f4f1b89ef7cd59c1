//! Exact k-nearest-neighbour and radius queries under the Euclidean metric.
//!
//! Two interchangeable backends are provided: an exhaustive scan and a
//! median-split k-d tree. They share the same distance routine, so their
//! answers agree exactly rather than approximately.
//!
//! Neighbourhoods are tie-inclusive: a k-distance neighbourhood holds every
//! other point whose distance does not exceed the k-distance, so it may have
//! more than `k` members. Entries are ordered by `(distance, id)`.

mod kdtree;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{l2, PointSet};
use crate::error::{Error, Result};

use kdtree::KdTree;

/// Neighbour search strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    BruteForce,
    #[default]
    KdTree,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::BruteForce => "brute-force",
            Backend::KdTree => "kd-tree",
        })
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute-force" | "brute" => Ok(Backend::BruteForce),
            "kd-tree" | "kdtree" | "tree" => Ok(Backend::KdTree),
            other => Err(Error::input(format!("unknown backend `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub id: usize,
    pub distance: f64,
}

impl Neighbor {
    #[inline]
    pub(crate) fn cmp_key(&self, other: &Self) -> Ordering {
        self.distance
            .total_cmp(&other.distance)
            .then(self.id.cmp(&other.id))
    }
}

/// Neighbours of one query point, ascending by `(distance, id)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborList(Vec<Neighbor>);

impl NeighborList {
    pub fn entries(&self) -> &[Neighbor] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|n| n.id)
    }
}

/// k-distance of a point together with its tie-inclusive neighbourhood.
#[derive(Debug, Clone, PartialEq)]
pub struct KDistanceProfile {
    pub point: usize,
    pub k_distance: f64,
    /// Ascending by `(distance, id)`; never contains `point` itself.
    pub neighborhood: Vec<Neighbor>,
}

impl KDistanceProfile {
    pub fn ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.neighborhood.iter().map(|n| n.id)
    }

    pub fn len(&self) -> usize {
        self.neighborhood.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighborhood.is_empty()
    }
}

/// Read-only query structure over a [`PointSet`].
#[derive(Debug)]
pub struct NeighborIndex<'a> {
    data: &'a PointSet,
    tree: Option<KdTree>,
}

impl<'a> NeighborIndex<'a> {
    pub fn build(data: &'a PointSet, backend: Backend) -> Result<Self> {
        if data.len() < 2 {
            return Err(Error::input(
                "a neighbour index needs at least two points",
            ));
        }
        let tree = match backend {
            Backend::BruteForce => None,
            Backend::KdTree => Some(KdTree::build(data)),
        };
        Ok(Self { data, tree })
    }

    pub fn backend(&self) -> Backend {
        if self.tree.is_some() {
            Backend::KdTree
        } else {
            Backend::BruteForce
        }
    }

    pub fn data(&self) -> &'a PointSet {
        self.data
    }

    fn check(&self, query: usize, k: usize) -> Result<()> {
        let n = self.data.len();
        if query >= n {
            return Err(Error::input(format!("unknown point id {query}")));
        }
        if k == 0 || k >= n {
            return Err(Error::input(format!(
                "k must be in 1..={} for {n} points, got {k}",
                n - 1
            )));
        }
        Ok(())
    }

    /// Tie-inclusive k nearest neighbours of an indexed point.
    pub fn query_knn(&self, query: usize, k: usize) -> Result<NeighborList> {
        self.check(query, k)?;
        Ok(NeighborList(self.knn_unchecked(query, k)))
    }

    pub fn k_distance_profile(&self, query: usize, k: usize) -> Result<KDistanceProfile> {
        self.check(query, k)?;
        Ok(self.profile_unchecked(query, k))
    }

    /// Computes the profile of every point once.
    pub fn neighborhoods(&self, k: usize) -> Result<Neighborhoods<'a>> {
        self.check(0, k)?;
        let profiles = (0..self.data.len())
            .map(|p| self.profile_unchecked(p, k))
            .collect();
        Ok(Neighborhoods {
            data: self.data,
            k,
            profiles,
        })
    }

    fn profile_unchecked(&self, query: usize, k: usize) -> KDistanceProfile {
        let neighborhood = self.knn_unchecked(query, k);
        KDistanceProfile {
            point: query,
            k_distance: neighborhood[k - 1].distance,
            neighborhood,
        }
    }

    fn knn_unchecked(&self, query: usize, k: usize) -> Vec<Neighbor> {
        match &self.tree {
            Some(tree) => tree.knn_inclusive(self.data, query, k),
            None => brute_force_knn(self.data, query, k),
        }
    }
}

fn brute_force_knn(data: &PointSet, query: usize, k: usize) -> Vec<Neighbor> {
    let q = data.row(query);
    let mut all: Vec<Neighbor> = (0..data.len())
        .filter(|&i| i != query)
        .map(|i| Neighbor {
            id: i,
            distance: l2(q, data.row(i)),
        })
        .collect();
    all.select_nth_unstable_by(k - 1, Neighbor::cmp_key);
    let radius = all[k - 1].distance;
    let mut out: Vec<Neighbor> = all.into_iter().filter(|n| n.distance <= radius).collect();
    out.sort_unstable_by(Neighbor::cmp_key);
    out
}

/// Cached k-distance profiles of every point of a dataset for a fixed `k`.
#[derive(Debug, Clone)]
pub struct Neighborhoods<'a> {
    data: &'a PointSet,
    k: usize,
    profiles: Vec<KDistanceProfile>,
}

impl<'a> Neighborhoods<'a> {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn data(&self) -> &'a PointSet {
        self.data
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    #[inline]
    pub fn profile(&self, p: usize) -> &KDistanceProfile {
        &self.profiles[p]
    }

    #[inline]
    pub fn k_distance(&self, p: usize) -> f64 {
        self.profiles[p].k_distance
    }

    pub fn profiles(&self) -> &[KDistanceProfile] {
        &self.profiles
    }
}
