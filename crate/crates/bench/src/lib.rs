//! Shared inputs for the criterion benchmarks.

use modmi::synthetic::gen_gaussian_mixture;
use modmi::{FeatureMatrix, LabelSequence};

/// `components` Gaussian clusters in `dims` dimensions, `rows` frames in all.
pub fn mixture(components: usize, dims: usize, rows: usize, seed: u64) -> (FeatureMatrix, LabelSequence) {
    let centers: Vec<Vec<f64>> = (0..components)
        .map(|c| (0..dims).map(|j| ((c * 31 + j * 17) % 23) as f64).collect())
        .collect();
    gen_gaussian_mixture(&centers, 1.5, rows.div_ceil(components), seed).expect("valid mixture")
}
