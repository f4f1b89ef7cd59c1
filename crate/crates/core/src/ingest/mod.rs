//! Loading labelled datasets and generating synthetic benchmarks.

mod csv_source;
mod synthetic;

pub use csv_source::{load_csv, standardize, write_labeled_csv, DatasetSpec, LabelColumn};
pub use synthetic::{make_synthetic, SyntheticSpec};
