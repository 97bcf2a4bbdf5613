//! Sources with known information content, and a brute-force oracle.
//!
//! The oracle works on a dense joint probability table and evaluates each
//! quantity from its own definition: mutual information and conditional
//! mutual information as expected log-ratios, conditional entropies as
//! expected `-log p(x | rest)`. The estimators in [`crate::infotheory`]
//! instead difference joint entropies of empirical counts, so agreement
//! between the two is a real check rather than a restatement.

use std::collections::BTreeMap;

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::infotheory::{cond_key, joint_key, pair_key, region_keys, InfoQuantities, LogBase, PAIRS};
use crate::ingestion::{FeatureMatrix, LabelSequence, DEFAULT_RATE_HZ};
use crate::rng;

/// Normalization slack accepted for a probability table.
pub const PMF_TOLERANCE: f64 = 1e-12;

/// Largest common denominator searched by [`exhaustive_stream`].
pub const MAX_DENOMINATOR: u64 = 1 << 16;

/// Stream names used for synthetic variables of a given arity.
pub fn default_names(arity: usize) -> Vec<String> {
    match arity {
        2 => vec!["X".into(), "Y".into()],
        3 => vec!["V".into(), "T".into(), "S".into()],
        n => (1..=n).map(|i| format!("X{i}")).collect(),
    }
}

/// Dense joint probability table, row-major with the last variable varying
/// fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    alphabet_sizes: Vec<usize>,
    probs: Vec<f64>,
}

impl JointPmf {
    pub fn new(alphabet_sizes: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if alphabet_sizes.is_empty() || alphabet_sizes.contains(&0) {
            return Err(Error::InvalidInput(format!(
                "alphabet sizes must be positive, got {alphabet_sizes:?}"
            )));
        }
        let cells: usize = alphabet_sizes.iter().product();
        if probs.len() != cells {
            return Err(Error::InvalidInput(format!(
                "table of shape {alphabet_sizes:?} needs {cells} cells, got {}",
                probs.len()
            )));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidInput(
                "probabilities must be finite and non-negative".into(),
            ));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PMF_TOLERANCE {
            return Err(Error::InvalidInput(format!(
                "probabilities sum to {sum}, not 1"
            )));
        }
        Ok(Self {
            alphabet_sizes,
            probs,
        })
    }

    /// Table proportional to non-negative integer weights.
    pub fn from_weights(alphabet_sizes: Vec<usize>, weights: &[u64]) -> Result<Self> {
        let total: u64 = weights.iter().sum();
        if total == 0 {
            return Err(Error::InvalidInput("weights are all zero".into()));
        }
        let probs = weights.iter().map(|&w| w as f64 / total as f64).collect();
        Self::new(alphabet_sizes, probs)
    }

    pub fn uniform(alphabet_sizes: Vec<usize>) -> Result<Self> {
        let cells = alphabet_sizes.iter().product();
        Self::from_weights(alphabet_sizes, &vec![1; cells])
    }

    /// Balanced bits `x`, `y` and `z = x xor y`.
    pub fn xor() -> Self {
        let mut w = vec![0; 8];
        for x in 0..2 {
            for y in 0..2 {
                w[x * 4 + y * 2 + (x ^ y)] = 1;
            }
        }
        Self::from_weights(vec![2, 2, 2], &w).unwrap()
    }

    /// `arity` copies of one uniform variable over `alphabet` symbols.
    pub fn identical(arity: usize, alphabet: usize) -> Self {
        let sizes = vec![alphabet; arity];
        let cells: usize = sizes.iter().product();
        let mut w = vec![0; cells];
        for s in 0..alphabet {
            let idx = (0..arity).fold(0, |acc, _| acc * alphabet + s);
            w[idx] = 1;
        }
        Self::from_weights(sizes, &w).unwrap()
    }

    pub fn arity(&self) -> usize {
        self.alphabet_sizes.len()
    }

    pub fn alphabet_sizes(&self) -> &[usize] {
        &self.alphabet_sizes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Symbol tuple of a flat cell index.
    pub fn tuple(&self, mut cell: usize) -> Vec<u32> {
        let mut t = vec![0u32; self.arity()];
        for (slot, &a) in t.iter_mut().zip(&self.alphabet_sizes).rev() {
            *slot = (cell % a) as u32;
            cell /= a;
        }
        t
    }

    /// Dense marginal over `coords`, keyed by the projected tuple.
    fn marginal(&self, coords: &[usize]) -> BTreeMap<Vec<u32>, f64> {
        let mut out = BTreeMap::new();
        for (cell, &p) in self.probs.iter().enumerate() {
            if p > 0.0 {
                let t = self.tuple(cell);
                *out.entry(coords.iter().map(|&i| t[i]).collect()).or_insert(0.0) += p;
            }
        }
        out
    }

    /// Non-zero cells with their tuples.
    fn support(&self) -> impl Iterator<Item = (Vec<u32>, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(c, &p)| (self.tuple(c), p))
    }
}

/// Random table over integer weights in `0..=max_weight`, alphabet sizes
/// in `1..=max_alphabet`. At least one cell carries weight.
pub fn random_pmf(seed: u64, arity: usize, max_alphabet: usize, max_weight: u64) -> JointPmf {
    let mut r = rng::seeded(seed);
    let sizes: Vec<usize> = (0..arity)
        .map(|_| 1 + rng::index_below(&mut r, max_alphabet))
        .collect();
    let cells: usize = sizes.iter().product();
    // Sparse tables exercise zero cells; dense ones exercise every tuple.
    let sparse = rng::index_below(&mut r, 2) == 0;
    let mut w: Vec<u64> = (0..cells)
        .map(|_| {
            if sparse && rng::index_below(&mut r, 2) == 0 {
                0
            } else {
                rng::index_below(&mut r, max_weight as usize + 1) as u64
            }
        })
        .collect();
    if w.iter().all(|&x| x == 0) {
        let c = rng::index_below(&mut r, cells);
        w[c] = 1;
    }
    JointPmf::from_weights(sizes, &w).unwrap()
}

fn expect_log<'a>(terms: impl Iterator<Item = (f64, f64)> + 'a) -> f64 {
    terms.map(|(p, ratio)| p * ratio.ln()).sum()
}

fn entropy_nats(marginal: &BTreeMap<Vec<u32>, f64>) -> f64 {
    -expect_log(marginal.values().map(|&p| (p, p)))
}

/// Exact quantities of a two- or three-variable table, named by
/// [`default_names`].
pub fn oracle_quantities(pmf: &JointPmf, base: LogBase) -> Result<InfoQuantities> {
    let n = pmf.arity();
    if !(2..=3).contains(&n) {
        return Err(Error::InvalidInput(format!(
            "oracle supports 2 or 3 variables, got {n}"
        )));
    }
    let sum: f64 = pmf.probs.iter().sum();
    if (sum - 1.0).abs() > PMF_TOLERANCE {
        return Err(Error::InvalidInput(format!("pmf sums to {sum}, not 1")));
    }
    let names = default_names(n);
    let singles: Vec<_> = (0..n).map(|i| pmf.marginal(&[i])).collect();
    let pairs: Vec<_> = PAIRS
        .iter()
        .filter(|(a, b)| *a < n && *b < n)
        .map(|&(a, b)| ((a, b), pmf.marginal(&[a, b])))
        .collect();
    let conv = |nats: f64| base.from_nats(nats);

    let mut entropies = BTreeMap::new();
    for (i, m) in singles.iter().enumerate() {
        entropies.insert(names[i].clone(), conv(entropy_nats(m)));
    }
    let mut joint_entropies = BTreeMap::new();
    let mut mutual_information = BTreeMap::new();
    let mut cond = BTreeMap::new();
    for ((a, b), joint) in &pairs {
        let (a, b) = (*a, *b);
        joint_entropies.insert(
            joint_key(&[&names[a], &names[b]]),
            conv(entropy_nats(joint)),
        );
        let mi = expect_log(joint.iter().map(|(t, &p)| {
            let pa = singles[a][&vec![t[0]]];
            let pb = singles[b][&vec![t[1]]];
            (p, p / (pa * pb))
        }));
        mutual_information.insert(pair_key(&names[a], &names[b]), conv(mi));
        // H(a | b) = -E log p(a | b), and symmetrically.
        let h_a_b = -expect_log(joint.iter().map(|(t, &p)| (p, p / singles[b][&vec![t[1]]])));
        let h_b_a = -expect_log(joint.iter().map(|(t, &p)| (p, p / singles[a][&vec![t[0]]])));
        cond.insert(cond_key(&names[a], &names[b]), conv(h_a_b));
        cond.insert(cond_key(&names[b], &names[a]), conv(h_b_a));
    }

    let mut q = InfoQuantities {
        entropies,
        joint_entropies,
        mutual_information,
        trivariate_mmi: None,
        multivariate_mmi: None,
        cond,
        regions: None,
        log_base: base,
    };
    if n == 2 {
        return Ok(q);
    }

    let full = pmf.marginal(&[0, 1, 2]);
    q.joint_entropies.insert(
        joint_key(&[&names[0], &names[1], &names[2]]),
        conv(entropy_nats(&full)),
    );
    let pair_of = |a: usize, b: usize| &pairs.iter().find(|(k, _)| *k == (a, b)).unwrap().1;
    let pick = |t: &[u32], a: usize, b: usize| vec![t[a], t[b]];
    // I(x;y | z) = E log [ p(x,y,z) p(z) / (p(x,z) p(y,z)) ].
    let cmi = |x: usize, y: usize, z: usize| {
        let (xz, yz) = ((x.min(z), x.max(z)), (y.min(z), y.max(z)));
        expect_log(pmf.support().map(|(t, p)| {
            let pz = singles[z][&vec![t[z]]];
            let pxz = pair_of(xz.0, xz.1)[&pick(&t, xz.0, xz.1)];
            let pyz = pair_of(yz.0, yz.1)[&pick(&t, yz.0, yz.1)];
            (p, p * pz / (pxz * pyz))
        }))
    };
    // H(x | y, z) = -E log [ p(x,y,z) / p(y,z) ], x being the third variable.
    let unique = |y: usize, z: usize| {
        let (lo, hi) = (y.min(z), y.max(z));
        -expect_log(
            pmf.support()
                .map(|(t, p)| (p, p / pair_of(lo, hi)[&pick(&t, lo, hi)])),
        )
    };
    let pairwise = [cmi(0, 1, 2), cmi(0, 2, 1), cmi(1, 2, 0)];
    let mi01 = q.mutual_information[&pair_key(&names[0], &names[1])];
    let center = mi01 - conv(pairwise[0]);
    q.trivariate_mmi = Some(center);
    let keys = region_keys([&names[0], &names[1], &names[2]]);
    let values = [
        conv(unique(1, 2)),
        conv(unique(0, 2)),
        conv(unique(0, 1)),
        conv(pairwise[0]),
        conv(pairwise[1]),
        conv(pairwise[2]),
        center,
    ];
    q.regions = Some(keys.into_iter().zip(values).collect());
    Ok(q)
}

fn streams_from_columns(pmf: &JointPmf, columns: Vec<Vec<u32>>) -> Result<Vec<LabelSequence>> {
    let names = default_names(pmf.arity());
    columns
        .into_iter()
        .zip(&pmf.alphabet_sizes)
        .zip(names)
        .map(|((col, &a), name)| LabelSequence::new(col, a as u32, DEFAULT_RATE_HZ, name))
        .collect()
}

/// Draws `n_frames` i.i.d. tuples by inverse CDF.
pub fn sample_discrete(pmf: &JointPmf, n_frames: usize, seed: u64) -> Result<Vec<LabelSequence>> {
    if n_frames == 0 {
        return Err(Error::InvalidInput("n_frames must be at least 1".into()));
    }
    let mut cdf = Vec::with_capacity(pmf.probs.len());
    let mut acc = 0.0;
    for &p in &pmf.probs {
        acc += p;
        cdf.push(acc);
    }
    let last_live = pmf.probs.iter().rposition(|&p| p > 0.0).unwrap();
    let mut r = rng::seeded(seed);
    let mut columns = vec![Vec::with_capacity(n_frames); pmf.arity()];
    for _ in 0..n_frames {
        let u = rng::unit_f64(&mut r);
        let cell = cdf.partition_point(|&c| c <= u).min(last_live);
        for (col, s) in columns.iter_mut().zip(pmf.tuple(cell)) {
            col.push(s);
        }
    }
    streams_from_columns(pmf, columns)
}

/// Smallest denominator `d` making every `p * d` an integer, with the
/// resulting counts.
fn integer_counts(pmf: &JointPmf) -> Result<Vec<u64>> {
    for d in 1..=MAX_DENOMINATOR {
        let df = d as f64;
        let counts: Vec<u64> = pmf.probs.iter().map(|p| (p * df).round() as u64).collect();
        let exact = pmf
            .probs
            .iter()
            .zip(&counts)
            .all(|(p, &c)| (p * df - c as f64).abs() < 1e-9 * df.max(1.0));
        if exact && counts.iter().sum::<u64>() == d {
            return Ok(counts);
        }
    }
    Err(Error::InvalidInput(format!(
        "probabilities are not multiples of 1/d for any d <= {MAX_DENOMINATOR}"
    )))
}

/// Streams whose empirical joint distribution equals `pmf` exactly: every
/// cell's tuple appears in proportion to its probability, and the whole
/// block is repeated `copies` times.
pub fn exhaustive_stream(pmf: &JointPmf, copies: usize) -> Result<Vec<LabelSequence>> {
    if copies == 0 {
        return Err(Error::InvalidInput("copies must be at least 1".into()));
    }
    let counts = integer_counts(pmf)?;
    let block: usize = counts.iter().sum::<u64>() as usize;
    let mut columns = vec![Vec::with_capacity(block * copies); pmf.arity()];
    for _ in 0..copies {
        for (cell, &c) in counts.iter().enumerate() {
            let t = pmf.tuple(cell);
            for _ in 0..c {
                for (col, &s) in columns.iter_mut().zip(&t) {
                    col.push(s);
                }
            }
        }
    }
    streams_from_columns(pmf, columns)
}

/// Isotropic Gaussian clusters, `n_per_center` rows per center in center
/// order. Returns the features (tag `"S"`) and each row's component index
/// (tag `"T"`).
pub fn gen_gaussian_mixture(
    centers: &[Vec<f64>],
    stddev: f64,
    n_per_center: usize,
    seed: u64,
) -> Result<(FeatureMatrix, LabelSequence)> {
    let dims = centers.first().map_or(0, Vec::len);
    if centers.is_empty() || dims == 0 || centers.iter().any(|c| c.len() != dims) {
        return Err(Error::InvalidInput(
            "centers must be a non-empty list of equal-length vectors".into(),
        ));
    }
    if !(stddev >= 0.0 && stddev.is_finite()) {
        return Err(Error::InvalidInput(format!("stddev must be >= 0, got {stddev}")));
    }
    if n_per_center == 0 {
        return Err(Error::InvalidInput("n_per_center must be at least 1".into()));
    }
    let mut r = rng::seeded(seed);
    let mut values = Vec::with_capacity(centers.len() * n_per_center * dims);
    let mut labels = Vec::with_capacity(centers.len() * n_per_center);
    for (c, center) in centers.iter().enumerate() {
        for _ in 0..n_per_center {
            for &m in center {
                let z: f64 = r.sample(StandardNormal);
                values.push((m + stddev * z) as f32);
            }
            labels.push(c as u32);
        }
    }
    let rows = labels.len();
    let features = FeatureMatrix::new(rows, dims, values, DEFAULT_RATE_HZ, "S")?;
    let labels = LabelSequence::new(labels, centers.len() as u32, DEFAULT_RATE_HZ, "T")?;
    Ok((features, labels))
}
