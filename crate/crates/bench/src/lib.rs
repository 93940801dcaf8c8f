//! Shared fixtures for the criterion benchmarks.

use std::path::PathBuf;

use hullknn::dataset::{load_dataset, split};
use hullknn::{DataFormat, Dataset, Mt19937};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

/// 90/10 stratified split of one of the bundled datasets.
pub fn bundled_split(file: &str, format: DataFormat, seed: u32) -> (Dataset, Dataset) {
    let ds = load_dataset(data_dir().join(file), format).expect("bundled dataset");
    let s = split(&ds, 0.1, seed, true).expect("split");
    (s.train, s.test)
}

/// `count` uniform points in `[-1, 1)^dim`.
pub fn cloud(seed: u32, dim: usize, count: usize) -> Vec<Vec<f64>> {
    let mut rng = Mt19937::new(seed);
    rng.sample_box(-1.0, 1.0, dim, count).expect("valid box")
}
