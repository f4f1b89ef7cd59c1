#![allow(dead_code)]

use std::path::{Path, PathBuf};

use plof_bench::{ExperimentConfig, ReportBundle};

pub fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn golden_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/benchmark_shape_tables.txt")
}

pub fn benchmark_shape_config() -> ExperimentConfig {
    ExperimentConfig::from_file(&workspace_root().join("configs/benchmark_shape.toml")).unwrap()
}

/// Every digit becomes `#`, so the comparison sees layout only.
pub fn mask_digits(text: &str) -> String {
    text.chars()
        .map(|c| if c.is_ascii_digit() { '#' } else { c })
        .collect()
}

/// Text tables of a timing-free bundle with digits masked.
pub fn table_shape(bundle: &ReportBundle) -> String {
    mask_digits(&plof_bench::tables::render_all(&bundle.without_timing()))
}
