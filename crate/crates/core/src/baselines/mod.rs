//! Comparison detectors: chunked-neighbourhood LOF ("FastLOF") and
//! cluster-then-prune LOF ("devToMean"), plus the k-means they rely on.

mod devtomean;
mod fastlof;
mod kmeans;

pub use devtomean::{
    default_cluster_count, deviation_to_mean, devtomean_scores, DevToMean, DevToMeanOutput,
};
pub use fastlof::{
    default_chunk_count, fastlof, fastlof_on_chunks, fastlof_scores, random_chunks, ChunkAssignment, FastLofOutput,
};
pub use kmeans::{kmeans, ClusterModel, DEFAULT_MAX_ITERS};
