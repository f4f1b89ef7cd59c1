//! Density-based outlier detection: LOF, prune-based LOF, and the
//! chunked / cluster-pruned LOF baselines, with evaluation metrics and
//! dataset loading.
//!
//! ```
//! use plof::{lof::MinPts, neighbors::Backend, prune::Plof, PointSet};
//!
//! let mut rows: Vec<[f64; 2]> = (0..30)
//!     .map(|i| [f64::from(i % 6), f64::from(i / 6)])
//!     .collect();
//! rows.push([20.0, 20.0]);
//! let data = PointSet::from_rows(&rows).unwrap();
//!
//! let out = Plof::new(MinPts::new(4).unwrap())
//!     .with_backend(Backend::KdTree)
//!     .run(&data)
//!     .unwrap();
//! assert_eq!(out.scores.argmax(), Some(30));
//! ```

pub mod baselines;
pub mod data;
mod error;
pub mod ingest;
pub mod lof;
pub mod metrics;
pub mod neighbors;
pub mod prune;

pub use data::{euclidean, GroundTruth, PointSet, ScoreVector};
pub use error::{Error, Result};
