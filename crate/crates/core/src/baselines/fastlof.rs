use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{PointSet, ScoreVector};
use crate::error::{Error, Result};
use crate::lof::{lof_subset, MinPts};
use crate::neighbors::{Backend, NeighborIndex};

const MAX_DRAWS: usize = 10;

/// Random partition of the point ids into chunks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkAssignment {
    pub chunk_of: Vec<usize>,
    pub chunk_count: usize,
    pub seed: u64,
}

impl ChunkAssignment {
    /// Members of chunk `c` in ascending id order.
    pub fn members(&self, c: usize) -> Vec<usize> {
        (0..self.chunk_of.len())
            .filter(|&i| self.chunk_of[i] == c)
            .collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.chunk_count];
        for &c in &self.chunk_of {
            sizes[c] += 1;
        }
        sizes
    }
}

/// `ceil(n / (10 * minpts))`, at least 1.
pub fn default_chunk_count(n: usize, minpts: MinPts) -> usize {
    n.div_ceil(10 * minpts.get()).max(1)
}

/// Assigns each point to a uniformly random chunk, redrawing (up to ten
/// draws in total) until every chunk has at least `min_size` members.
pub fn random_chunks(
    n: usize,
    chunk_count: usize,
    min_size: usize,
    seed: u64,
) -> Result<ChunkAssignment> {
    if chunk_count == 0 {
        return Err(Error::input("chunk count must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_DRAWS {
        let chunk_of: Vec<usize> = (0..n).map(|_| rng.random_range(0..chunk_count)).collect();
        let assignment = ChunkAssignment {
            chunk_of,
            chunk_count,
            seed,
        };
        if assignment.sizes().iter().all(|&s| s >= min_size) {
            return Ok(assignment);
        }
    }
    Err(Error::input(format!(
        "could not split {n} points into {chunk_count} chunks of at least {min_size} after {MAX_DRAWS} draws"
    )))
}

#[derive(Debug, Clone)]
pub struct FastLofOutput {
    pub scores: ScoreVector,
    pub chunks: ChunkAssignment,
    /// Global ids of the neighbourhood used for each point.
    pub neighborhoods: Vec<Vec<usize>>,
}

/// LOF where each point only sees neighbours from its own random chunk.
pub fn fastlof(
    data: &PointSet,
    minpts: MinPts,
    chunk_count: usize,
    seed: u64,
    backend: Backend,
) -> Result<FastLofOutput> {
    let chunks = random_chunks(data.len(), chunk_count, minpts.get() + 1, seed)?;
    fastlof_on_chunks(data, minpts, chunks, backend)
}

/// Scores with a given partition instead of a random one.
pub fn fastlof_on_chunks(
    data: &PointSet,
    minpts: MinPts,
    chunks: ChunkAssignment,
    backend: Backend,
) -> Result<FastLofOutput> {
    let n = data.len();
    if chunks.chunk_of.len() != n || chunks.chunk_of.iter().any(|&c| c >= chunks.chunk_count) {
        return Err(Error::input("chunk assignment does not match the dataset"));
    }
    let mut scores = vec![0.0; n];
    let mut neighborhoods = vec![Vec::new(); n];

    for c in 0..chunks.chunk_count {
        let members = chunks.members(c);
        if members.len() <= minpts.get() {
            return Err(Error::input(format!(
                "chunk {c} has {} members, needs more than {}",
                members.len(),
                minpts.get()
            )));
        }
        let sub = data.select(&members)?;
        let index = NeighborIndex::build(&sub, backend)?;
        let nbhd = index.neighborhoods(minpts.get())?;
        let local = lof_subset(&nbhd, &vec![true; members.len()])?;
        for (local_id, &global) in members.iter().enumerate() {
            scores[global] = local[local_id];
            neighborhoods[global] = nbhd.profile(local_id).ids().map(|o| members[o]).collect();
        }
    }

    Ok(FastLofOutput {
        scores: ScoreVector::new(scores),
        chunks,
        neighborhoods,
    })
}

pub fn fastlof_scores(
    data: &PointSet,
    minpts: MinPts,
    chunk_count: usize,
    seed: u64,
    backend: Backend,
) -> Result<ScoreVector> {
    fastlof(data, minpts, chunk_count, seed, backend).map(|o| o.scores)
}
