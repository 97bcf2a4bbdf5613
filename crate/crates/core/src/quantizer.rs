//! K-means vector quantization of feature streams.
//!
//! Centers are seeded with k-means++ and refined by Lloyd iterations under
//! squared Euclidean distance. Work is spread over the rayon pool, but every
//! floating-point reduction runs in a fixed order (per point, per cluster in
//! point-index order, then across points in index order), so a fit is
//! bit-identical for any thread count.
//!
//! KMC1 codebook layout (little-endian): `"KMC1"`, k `u32`, dims `u32`,
//! seed `u64`, normalization flag `u8`, then when the flag is set dims
//! `(mean, stddev)` pairs of `f32`, then k×dims `f32` centroids row-major.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ingestion::{FeatureMatrix, LabelSequence};
use crate::rng::{self, Rng};

pub const KMC_MAGIC: &[u8; 4] = b"KMC1";
pub const KMC_HEADER_LEN: usize = 21;

/// Relative slack allowed when checking that distortion never increases.
pub const MONOTONE_SLACK: f64 = 1e-9;

/// Cap on extra update rounds spent clearing clusters that end up empty
/// after the last iteration.
const EMPTY_REPAIR_ROUNDS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct FitParams {
    pub k: usize,
    pub seed: u64,
    /// Stop once the relative distortion decrease falls below this.
    pub tol: f64,
    pub max_iter: usize,
    /// z-normalize each dimension before clustering.
    pub normalize: bool,
}

impl FitParams {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            ..Self::default()
        }
    }
}

impl Default for FitParams {
    fn default() -> Self {
        Self {
            k: 2000,
            seed: 0,
            tol: 1e-4,
            max_iter: 300,
            normalize: false,
        }
    }
}

/// Per-dimension `(x - mean) / stddev` applied before clustering.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalization {
    pub mean: Vec<f32>,
    pub stddev: Vec<f32>,
}

impl Normalization {
    /// Population statistics of each column. Constant columns get stddev 1.
    pub fn fit(x: &FeatureMatrix) -> Self {
        let d = x.dims();
        let n = x.rows() as f64;
        let mut sum = vec![0.0f64; d];
        for row in x.iter_rows() {
            for (s, &v) in sum.iter_mut().zip(row) {
                *s += v as f64;
            }
        }
        let mean: Vec<f64> = sum.iter().map(|s| s / n).collect();
        let mut var = vec![0.0f64; d];
        for row in x.iter_rows() {
            for ((acc, &v), m) in var.iter_mut().zip(row).zip(&mean) {
                let dv = v as f64 - m;
                *acc += dv * dv;
            }
        }
        let stddev = var
            .iter()
            .map(|v| {
                let s = (v / n).sqrt() as f32;
                if s > 0.0 && s.is_finite() {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        Self {
            mean: mean.iter().map(|&m| m as f32).collect(),
            stddev,
        }
    }

    fn apply(&self, x: &FeatureMatrix) -> Vec<f32> {
        let mut out = x.values().to_vec();
        for row in out.chunks_exact_mut(self.mean.len()) {
            for ((v, m), s) in row.iter_mut().zip(&self.mean).zip(&self.stddev) {
                *v = (*v - m) / s;
            }
        }
        out
    }
}

/// Statistics of the fit that produced a codebook. Not persisted in KMC1.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSummary {
    pub iterations_run: usize,
    /// Mean squared distance of each point to its assigned centroid.
    pub final_distortion: f64,
    /// Distortion after the initial assignment and after every update.
    pub distortion_history: Vec<f64>,
    pub cluster_sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    k: usize,
    dims: usize,
    centroids: Vec<f32>,
    seed: u64,
    normalization: Option<Normalization>,
    training: Option<TrainingSummary>,
}

impl Codebook {
    pub fn new(
        k: usize,
        dims: usize,
        centroids: Vec<f32>,
        seed: u64,
        normalization: Option<Normalization>,
    ) -> Result<Self> {
        if k == 0 || dims == 0 {
            return Err(Error::InvalidInput(format!(
                "codebook must be at least 1x1, got {k}x{dims}"
            )));
        }
        if centroids.len() != k * dims {
            return Err(Error::InvalidInput(format!(
                "{k}x{dims} codebook needs {} values, got {}",
                k * dims,
                centroids.len()
            )));
        }
        if let Some(i) = centroids.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: i / dims,
                col: i % dims,
            });
        }
        if let Some(n) = &normalization {
            if n.mean.len() != dims || n.stddev.len() != dims {
                return Err(Error::DimensionMismatch {
                    expected: dims,
                    actual: n.mean.len().min(n.stddev.len()),
                });
            }
            if n.mean.iter().chain(&n.stddev).any(|v| !v.is_finite())
                || n.stddev.contains(&0.0)
            {
                return Err(Error::InvalidInput(
                    "normalization must be finite with nonzero stddev".into(),
                ));
            }
        }
        Ok(Self {
            k,
            dims,
            centroids,
            seed,
            normalization,
            training: None,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn centroids(&self) -> &[f32] {
        &self.centroids
    }

    pub fn centroid(&self, c: usize) -> &[f32] {
        &self.centroids[c * self.dims..(c + 1) * self.dims]
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn normalization(&self) -> Option<&Normalization> {
        self.normalization.as_ref()
    }

    /// `None` for codebooks loaded from disk.
    pub fn training(&self) -> Option<&TrainingSummary> {
        self.training.as_ref()
    }

    pub fn iterations_run(&self) -> Option<usize> {
        self.training.as_ref().map(|t| t.iterations_run)
    }

    pub fn final_distortion(&self) -> Option<f64> {
        self.training.as_ref().map(|t| t.final_distortion)
    }

    /// The codebook without training statistics, as it reads back from disk.
    pub fn without_training(&self) -> Self {
        Self {
            training: None,
            ..self.clone()
        }
    }

    /// Hex SHA-256 of the KMC1 encoding.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(encode_codebook(self));
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }

    fn prepared(&self, x: &FeatureMatrix) -> Result<Vec<f32>> {
        if x.dims() != self.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dims,
                actual: x.dims(),
            });
        }
        Ok(match &self.normalization {
            Some(n) => n.apply(x),
            None => x.values().to_vec(),
        })
    }
}

fn sq_dist(a: &[f32], b: &[f32]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x as f64 - y as f64;
            d * d
        })
        .sum()
}

/// Squared distance, abandoned early once it reaches `bound`.
fn sq_dist_bounded(a: &[f32], b: &[f32], bound: f64) -> f64 {
    let mut acc = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let d = x as f64 - y as f64;
        acc += d * d;
        if acc >= bound {
            return acc;
        }
    }
    acc
}

/// Nearest centroid, lowest index on ties.
fn nearest(point: &[f32], centroids: &[f32], dims: usize) -> (u32, f64) {
    let mut best = (0u32, f64::INFINITY);
    for (c, centroid) in centroids.chunks_exact(dims).enumerate() {
        let d = sq_dist_bounded(point, centroid, best.1);
        if d < best.1 {
            best = (c as u32, d);
        }
    }
    best
}

fn assign_all(data: &[f32], dims: usize, centroids: &[f32]) -> (Vec<u32>, Vec<f64>) {
    data.par_chunks_exact(dims)
        .map(|p| nearest(p, centroids, dims))
        .unzip()
}

/// Mean of per-point distances, summed in point order.
fn mean_distortion(dists: &[f64]) -> f64 {
    dists.iter().sum::<f64>() / dists.len() as f64
}

fn distinct_rows(data: &[f32], dims: usize) -> usize {
    // -0.0 and 0.0 are the same point.
    let canon = |v: f32| if v == 0.0 { 0u32 } else { v.to_bits() };
    data.chunks_exact(dims)
        .map(|r| r.iter().map(|&v| canon(v)).collect::<Vec<_>>())
        .collect::<HashSet<_>>()
        .len()
}

fn kmeans_plus_plus(data: &[f32], dims: usize, k: usize, rng: &mut Rng) -> Vec<f32> {
    let n = data.len() / dims;
    let row = |i: usize| &data[i * dims..(i + 1) * dims];
    let mut centroids = Vec::with_capacity(k * dims);
    let first = rng::index_below(rng, n);
    centroids.extend_from_slice(row(first));
    let mut weight: Vec<f64> = data
        .par_chunks_exact(dims)
        .map(|p| sq_dist(p, row(first)))
        .collect();
    for _ in 1..k {
        let total: f64 = weight.iter().sum();
        let target = rng::unit_f64(rng) * total;
        let mut acc = 0.0;
        let mut pick = None;
        for (i, &w) in weight.iter().enumerate() {
            acc += w;
            if acc > target && w > 0.0 {
                pick = Some(i);
                break;
            }
        }
        let pick = pick.unwrap_or_else(|| {
            weight
                .iter()
                .rposition(|&w| w > 0.0)
                .expect("fewer distinct rows than requested clusters")
        });
        let center = row(pick).to_vec();
        weight
            .par_iter_mut()
            .zip(data.par_chunks_exact(dims))
            .for_each(|(w, p)| *w = w.min(sq_dist(p, &center)));
        centroids.extend_from_slice(&center);
    }
    centroids
}

/// Point indices of each cluster, in increasing index order.
fn members(labels: &[u32], k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); k];
    for (i, &l) in labels.iter().enumerate() {
        out[l as usize].push(i);
    }
    out
}

fn cluster_mean(data: &[f32], dims: usize, idx: &[usize]) -> Vec<f32> {
    let mut sum = vec![0.0f64; dims];
    for &i in idx {
        for (s, &v) in sum.iter_mut().zip(&data[i * dims..(i + 1) * dims]) {
            *s += v as f64;
        }
    }
    let n = idx.len() as f64;
    sum.iter().map(|s| (s / n) as f32).collect()
}

/// Recomputes centroids as member means. Each empty cluster takes the point
/// farthest from its updated centroid among clusters with at least two
/// members (lowest index on ties). Returns the number of repairs.
fn update(data: &[f32], dims: usize, labels: &mut [u32], centroids: &mut [f32], k: usize) -> usize {
    let mut groups = members(labels, k);
    centroids
        .par_chunks_exact_mut(dims)
        .zip(groups.par_iter())
        .filter(|(_, idx)| !idx.is_empty())
        .for_each(|(c, idx)| c.copy_from_slice(&cluster_mean(data, dims, idx)));

    let empty: Vec<usize> = (0..k).filter(|&c| groups[c].is_empty()).collect();
    if empty.is_empty() {
        return 0;
    }
    let mut dist: Vec<f64> = data
        .par_chunks_exact(dims)
        .zip(labels.par_iter())
        .map(|(p, &l)| sq_dist(p, &centroids[l as usize * dims..(l as usize + 1) * dims]))
        .collect();
    let mut sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
    let mut donors = Vec::new();
    for &e in &empty {
        let mut best: Option<(usize, f64)> = None;
        for (i, &d) in dist.iter().enumerate() {
            if sizes[labels[i] as usize] >= 2 && best.is_none_or(|(_, b)| d > b) {
                best = Some((i, d));
            }
        }
        let (p, _) = best.expect("no donor point for an empty cluster");
        let from = labels[p] as usize;
        log::debug!("cluster {e} is empty; moving point {p} from cluster {from}");
        sizes[from] -= 1;
        sizes[e] = 1;
        labels[p] = e as u32;
        dist[p] = 0.0;
        centroids[e * dims..(e + 1) * dims].copy_from_slice(&data[p * dims..(p + 1) * dims]);
        donors.push(from);
    }
    groups = members(labels, k);
    donors.sort_unstable();
    donors.dedup();
    for c in donors {
        if !empty.contains(&c) {
            let m = cluster_mean(data, dims, &groups[c]);
            centroids[c * dims..(c + 1) * dims].copy_from_slice(&m);
        }
    }
    empty.len()
}

/// Fits a codebook and also returns the labels of the training rows.
pub fn fit_with_labels(x: &FeatureMatrix, params: &FitParams) -> Result<(Codebook, Vec<u32>)> {
    let FitParams {
        k,
        seed,
        tol,
        max_iter,
        normalize,
    } = *params;
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    if max_iter == 0 {
        return Err(Error::InvalidInput("max_iter must be at least 1".into()));
    }
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::InvalidInput(format!("tol must be finite and >= 0, got {tol}")));
    }
    if let Some(i) = x.values().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            row: i / x.dims(),
            col: i % x.dims(),
        });
    }
    let dims = x.dims();
    let norm = normalize.then(|| Normalization::fit(x));
    let data = match &norm {
        Some(n) => n.apply(x),
        None => x.values().to_vec(),
    };
    let distinct = distinct_rows(&data, dims);
    if k > distinct {
        return Err(Error::InfeasibleK { k, distinct });
    }

    let mut rng = rng::seeded(seed);
    let mut centroids = kmeans_plus_plus(&data, dims, k, &mut rng);
    let (mut labels, dists) = assign_all(&data, dims, &centroids);
    let mut distortion = mean_distortion(&dists);
    let mut history = vec![distortion];
    let mut iterations = 0;

    let step = |labels: &mut Vec<u32>, centroids: &mut Vec<f32>, history: &mut Vec<f64>| {
        update(&data, dims, labels, centroids, k);
        let (l, d) = assign_all(&data, dims, centroids);
        *labels = l;
        let next = mean_distortion(&d);
        let prev = *history.last().unwrap();
        if next > prev * (1.0 + MONOTONE_SLACK) {
            log::warn!("k-means distortion increased from {prev} to {next}");
        }
        history.push(next);
        next
    };

    while iterations < max_iter && distortion > 0.0 {
        let next = step(&mut labels, &mut centroids, &mut history);
        iterations += 1;
        let converged = (distortion - next) / distortion < tol;
        distortion = next;
        if converged {
            break;
        }
    }

    let mut rounds = 0;
    while members(&labels, k).iter().any(Vec::is_empty) && rounds < EMPTY_REPAIR_ROUNDS {
        distortion = step(&mut labels, &mut centroids, &mut history);
        rounds += 1;
    }

    let cluster_sizes = members(&labels, k).iter().map(Vec::len).collect();
    let mut cb = Codebook::new(k, dims, centroids, seed, norm)?;
    cb.training = Some(TrainingSummary {
        iterations_run: iterations,
        final_distortion: distortion,
        distortion_history: history,
        cluster_sizes,
    });
    Ok((cb, labels))
}

/// Fits a k-means codebook to the rows of `x`.
pub fn fit(x: &FeatureMatrix, params: &FitParams) -> Result<Codebook> {
    fit_with_labels(x, params).map(|(cb, _)| cb)
}

/// Labels every row of `x` with its nearest centroid (lowest index on ties).
pub fn assign(cb: &Codebook, x: &FeatureMatrix) -> Result<LabelSequence> {
    let data = cb.prepared(x)?;
    let (labels, _) = assign_all(&data, cb.dims, &cb.centroids);
    LabelSequence::new(
        labels,
        cb.k as u32,
        x.sample_rate_hz(),
        x.modality_tag().to_string(),
    )
}

pub fn encode_codebook(cb: &Codebook) -> Vec<u8> {
    let norm_len = cb.normalization.as_ref().map_or(0, |_| cb.dims * 8);
    let mut out = Vec::with_capacity(KMC_HEADER_LEN + norm_len + cb.centroids.len() * 4);
    out.extend_from_slice(KMC_MAGIC);
    out.extend_from_slice(&(cb.k as u32).to_le_bytes());
    out.extend_from_slice(&(cb.dims as u32).to_le_bytes());
    out.extend_from_slice(&cb.seed.to_le_bytes());
    out.push(cb.normalization.is_some() as u8);
    if let Some(n) = &cb.normalization {
        for (m, s) in n.mean.iter().zip(&n.stddev) {
            out.extend_from_slice(&m.to_le_bytes());
            out.extend_from_slice(&s.to_le_bytes());
        }
    }
    for v in &cb.centroids {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_codebook(bytes: &[u8]) -> Result<Codebook> {
    if bytes.len() < KMC_HEADER_LEN {
        return Err(Error::SizeMismatch {
            expected: KMC_HEADER_LEN as u64,
            actual: bytes.len() as u64,
        });
    }
    if &bytes[..4] != KMC_MAGIC {
        return Err(Error::Format(format!(
            "expected magic KMC1, found {:?}",
            String::from_utf8_lossy(&bytes[..4])
        )));
    }
    let u32_at = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap()) as usize;
    let k = u32_at(4);
    let dims = u32_at(8);
    let seed = u64::from_le_bytes(bytes[12..20].try_into().unwrap());
    let normalized = match bytes[20] {
        0 => false,
        1 => true,
        f => return Err(Error::Format(format!("normalization flag must be 0 or 1, got {f}"))),
    };
    let norm_len = if normalized { dims as u64 * 8 } else { 0 };
    let expected = KMC_HEADER_LEN as u64 + norm_len + k as u64 * dims as u64 * 4;
    if bytes.len() as u64 != expected {
        return Err(Error::SizeMismatch {
            expected,
            actual: bytes.len() as u64,
        });
    }
    let floats = |from: usize, to: usize| -> Vec<f32> {
        bytes[from..to]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect()
    };
    let body = KMC_HEADER_LEN + norm_len as usize;
    let normalization = normalized.then(|| {
        let pairs = floats(KMC_HEADER_LEN, body);
        Normalization {
            mean: pairs.iter().step_by(2).copied().collect(),
            stddev: pairs.iter().skip(1).step_by(2).copied().collect(),
        }
    });
    Codebook::new(k, dims, floats(body, bytes.len()), seed, normalization)
}

pub fn save_codebook(cb: &Codebook, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_codebook(cb)).map_err(|e| Error::io(path, e))
}

pub fn load_codebook(path: impl AsRef<Path>) -> Result<Codebook> {
    let path = path.as_ref();
    decode_codebook(&fs::read(path).map_err(|e| Error::io(path, e))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: &[Vec<f32>]) -> FeatureMatrix {
        FeatureMatrix::from_rows(rows, 25.0, "x").unwrap()
    }

    fn two_points() -> FeatureMatrix {
        let mut rows = vec![vec![0.0, 0.0]; 10];
        rows.extend(vec![vec![10.0, 10.0]; 10]);
        matrix(&rows)
    }

    #[test]
    fn separable_pair() {
        let cb = fit(&two_points(), &FitParams { k: 2, seed: 3, ..Default::default() }).unwrap();
        let mut cs: Vec<Vec<f32>> = (0..2).map(|c| cb.centroid(c).to_vec()).collect();
        cs.sort_by(|a, b| a[0].total_cmp(&b[0]));
        assert_eq!(cs, vec![vec![0.0, 0.0], vec![10.0, 10.0]]);
        assert_eq!(cb.final_distortion(), Some(0.0));
    }

    #[test]
    fn single_cluster_is_column_mean() {
        let x = matrix(&[vec![1.0, 2.0], vec![3.0, -2.0], vec![5.0, 6.0], vec![7.0, 0.5]]);
        let cb = fit(&x, &FitParams { k: 1, ..Default::default() }).unwrap();
        assert_eq!(cb.centroid(0), &[4.0, 1.625]);
    }

    #[test]
    fn infeasible_k() {
        let err = fit(&two_points(), &FitParams::new(3)).unwrap_err();
        assert!(matches!(err, Error::InfeasibleK { k: 3, distinct: 2 }));
    }

    #[test]
    fn non_finite_and_zero_params_rejected() {
        assert!(fit(&two_points(), &FitParams { k: 1, max_iter: 0, ..Default::default() }).is_err());
        assert!(fit(&two_points(), &FitParams::new(0)).is_err());
    }

    #[test]
    fn assign_exact_and_ties() {
        let centroids = vec![0.0, 0.0, 2.0, 0.0, 9.0, 9.0, 5.0, 5.0, 4.0, 0.0];
        let cb = Codebook::new(5, 2, centroids, 0, None).unwrap();
        let x = matrix(&[vec![5.0, 5.0], vec![3.0, 0.0]]);
        let l = assign(&cb, &x).unwrap();
        // (3,0) is equidistant from centroids 1 and 4.
        assert_eq!(l.symbols(), &[3, 1]);
        assert_eq!(l.alphabet_size(), 5);

        let wrong = matrix(&[vec![1.0, 2.0, 3.0]]);
        assert!(matches!(
            assign(&cb, &wrong),
            Err(Error::DimensionMismatch { expected: 2, actual: 3 })
        ));
    }

    #[test]
    fn empty_cluster_is_repaired() {
        let data = vec![0.0f32, 1.0, 2.0, 10.0];
        let mut labels = vec![0u32, 0, 0, 0];
        let mut centroids = vec![0.0f32, 100.0];
        let repairs = update(&data, 1, &mut labels, &mut centroids, 2);
        assert_eq!(repairs, 1);
        // Mean 3.25: the point at 10 is farthest and moves to cluster 1.
        assert_eq!(labels, vec![0, 0, 0, 1]);
        assert_eq!(centroids, vec![1.0, 10.0]);
    }

    #[test]
    fn normalization_is_stored_and_applied() {
        let x = matrix(&[vec![0.0, 1000.0], vec![1.0, 3000.0], vec![2.0, 1000.0], vec![3.0, 3000.0]]);
        let params = FitParams { k: 2, normalize: true, ..Default::default() };
        let (cb, labels) = fit_with_labels(&x, &params).unwrap();
        let n = cb.normalization().unwrap();
        assert_eq!(n.mean, vec![1.5, 2000.0]);
        assert_eq!(n.stddev[1], 1000.0);
        assert_eq!(assign(&cb, &x).unwrap().symbols(), labels.as_slice());
    }

    #[test]
    fn codebook_round_trip_and_size() {
        let params = FitParams { k: 2, normalize: true, seed: 99, ..Default::default() };
        let cb = fit(&two_points(), &params).unwrap();
        let bytes = encode_codebook(&cb);
        assert_eq!(bytes.len(), KMC_HEADER_LEN + 2 * 8 + 2 * 2 * 4);
        let back = decode_codebook(&bytes).unwrap();
        assert_eq!(back, cb.without_training());
        assert_eq!(encode_codebook(&back), bytes);

        assert!(matches!(
            decode_codebook(&bytes[..bytes.len() - 1]),
            Err(Error::SizeMismatch { .. })
        ));
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(decode_codebook(&bad), Err(Error::Format(_))));
    }

    #[test]
    fn large_codebook_file_size() {
        // 21-byte header plus 2000 * 768 * 4 bytes of centroids.
        let cb = Codebook::new(2000, 768, vec![0.5; 2000 * 768], 1, None).unwrap();
        assert_eq!(encode_codebook(&cb).len(), 21 + 6_144_000);
    }
}
