//! Plug-in entropic quantities over aligned discrete streams.
//!
//! Every estimate is computed from the empirical joint distribution of symbol
//! tuples. Cells with zero count are never materialized, which realizes the
//! `0 log 0 = 0` convention, and counts are always summed in tuple order so
//! results do not depend on hashing or thread scheduling.

use std::collections::BTreeMap;
use std::f64::consts::{LN_10, LN_2};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingestion::LabelSequence;

/// Slack below zero within which a mutual information estimate is treated
/// as rounding noise and clamped to 0.
pub const MI_CLAMP_TOLERANCE: f64 = 1e-9;

/// Logarithm base for reported quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum LogBase {
    /// Bits.
    #[default]
    #[serde(rename = "2")]
    Two,
    /// Nats.
    #[serde(rename = "e")]
    E,
    /// Hartleys.
    #[serde(rename = "10")]
    Ten,
}

impl LogBase {
    /// Converts a value in nats to this base.
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            LogBase::E => nats,
            LogBase::Two => nats / LN_2,
            LogBase::Ten => nats / LN_10,
        }
    }

    /// `log(x)` in this base.
    pub fn log(self, x: f64) -> f64 {
        self.from_nats(x.ln())
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogBase::Two => "2",
            LogBase::E => "e",
            LogBase::Ten => "10",
        })
    }
}

impl FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2" => Ok(LogBase::Two),
            "e" => Ok(LogBase::E),
            "10" => Ok(LogBase::Ten),
            other => Err(Error::InvalidInput(format!(
                "log base must be one of 2, e, 10; got {other:?}"
            ))),
        }
    }
}

fn check_aligned(streams: &[&LabelSequence]) -> Result<usize> {
    let first = streams
        .first()
        .ok_or_else(|| Error::InvalidInput("no streams given".into()))?;
    let len = first.len();
    if streams.iter().any(|s| s.len() != len) {
        return Err(Error::Misaligned(streams.iter().map(|s| s.len()).collect()));
    }
    Ok(len)
}

/// Frame indices sorted by their symbol tuple, and the run lengths of equal
/// tuples in that order.
fn tuple_runs(streams: &[&LabelSequence], len: usize) -> (Vec<usize>, Vec<u64>) {
    let cols: Vec<&[u32]> = streams.iter().map(|s| s.symbols()).collect();
    let key_cmp = |&a: &usize, &b: &usize| {
        cols.iter()
            .map(|c| c[a].cmp(&c[b]))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    };
    let mut order: Vec<usize> = (0..len).collect();
    // Stable sort keeps the permutation deterministic for equal tuples.
    order.sort_by(key_cmp);
    let mut runs = Vec::new();
    let mut start = 0;
    for i in 1..=len {
        if i == len || key_cmp(&order[i - 1], &order[i]).is_ne() {
            runs.push((i - start) as u64);
            start = i;
        }
    }
    (order, runs)
}

fn entropy_nats_of_counts<'a>(counts: impl Iterator<Item = &'a u64>, total: u64) -> f64 {
    let n = total as f64;
    let mut h = 0.0;
    for &c in counts {
        let p = c as f64 / n;
        h -= p * p.ln();
    }
    h
}

/// Empirical counts of aligned symbol tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointDistribution {
    arity: usize,
    counts: BTreeMap<Vec<u32>, u64>,
    total: u64,
}

impl JointDistribution {
    /// Builds a distribution from explicit tuple counts. Zero counts are
    /// dropped.
    pub fn from_counts(arity: usize, counts: impl IntoIterator<Item = (Vec<u32>, u64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (tuple, c) in counts {
            if tuple.len() != arity {
                return Err(Error::InvalidInput(format!(
                    "tuple {tuple:?} does not have arity {arity}"
                )));
            }
            if c > 0 {
                *map.entry(tuple).or_insert(0) += c;
            }
        }
        let total = map.values().sum();
        if total == 0 {
            return Err(Error::InvalidInput("distribution has no mass".into()));
        }
        Ok(Self {
            arity,
            counts: map,
            total,
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn counts(&self) -> &BTreeMap<Vec<u32>, u64> {
        &self.counts
    }

    pub fn support_size(&self) -> usize {
        self.counts.len()
    }

    /// Sums out every coordinate not listed in `coords`.
    pub fn marginal(&self, coords: &[usize]) -> Result<Self> {
        if let Some(&c) = coords.iter().find(|&&c| c >= self.arity) {
            return Err(Error::InvalidInput(format!(
                "coordinate {c} out of range for arity {}",
                self.arity
            )));
        }
        Self::from_counts(
            coords.len(),
            self.counts
                .iter()
                .map(|(t, &c)| (coords.iter().map(|&i| t[i]).collect(), c)),
        )
    }
}

/// Counts the symbol tuples of aligned streams.
pub fn joint_counts(streams: &[&LabelSequence]) -> Result<JointDistribution> {
    let len = check_aligned(streams)?;
    let (order, runs) = tuple_runs(streams, len);
    let mut counts = BTreeMap::new();
    let mut at = 0usize;
    for c in runs {
        let i = order[at];
        counts.insert(streams.iter().map(|s| s.symbols()[i]).collect(), c);
        at += c as usize;
    }
    Ok(JointDistribution {
        arity: streams.len(),
        counts,
        total: len as u64,
    })
}

/// Shannon entropy of a joint distribution.
pub fn entropy(d: &JointDistribution, base: LogBase) -> f64 {
    base.from_nats(entropy_nats_of_counts(d.counts.values(), d.total))
}

/// Joint entropy of aligned streams, without materializing the tuple map.
pub fn joint_entropy(streams: &[&LabelSequence], base: LogBase) -> Result<f64> {
    let len = check_aligned(streams)?;
    let (_, runs) = tuple_runs(streams, len);
    Ok(base.from_nats(entropy_nats_of_counts(runs.iter(), len as u64)))
}

fn clamp_mi(raw: f64) -> f64 {
    if raw < 0.0 && raw > -MI_CLAMP_TOLERANCE {
        log::debug!("clamping mutual information {raw:e} to 0");
        0.0
    } else {
        raw
    }
}

/// `I(a;b) = H(a) + H(b) - H(a;b)`.
fn mi_from_entropies(h_a: f64, h_b: f64, h_ab: f64) -> f64 {
    clamp_mi(h_a + h_b - h_ab)
}

/// Mutual information `H(a) + H(b) - H(a;b)`, clamped at 0 when rounding
/// pushes it marginally negative.
pub fn mutual_information(a: &LabelSequence, b: &LabelSequence, base: LogBase) -> Result<f64> {
    let h_ab = joint_entropy(&[a, b], base)?;
    Ok(mi_from_entropies(
        joint_entropy(&[a], base)?,
        joint_entropy(&[b], base)?,
        h_ab,
    ))
}

/// `H(a | given) = H(a; given) - H(given)`. With no conditioning streams this
/// is `H(a)`.
pub fn conditional_entropy(
    a: &LabelSequence,
    given: &[&LabelSequence],
    base: LogBase,
) -> Result<f64> {
    if given.is_empty() {
        return joint_entropy(&[a], base);
    }
    let mut all = Vec::with_capacity(given.len() + 1);
    all.push(a);
    all.extend_from_slice(given);
    let h = joint_entropy(&all, base)? - joint_entropy(given, base)?;
    Ok(clamp_mi(h))
}

/// Frame indices grouped by the conditioning symbol, in symbol order.
fn partition_by(given: &LabelSequence) -> Vec<Vec<usize>> {
    let mut groups: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, &z) in given.symbols().iter().enumerate() {
        groups.entry(z).or_default().push(i);
    }
    groups.into_values().collect()
}

/// `I(X1;...;Xn | Z) = sum_z p(z) I(X1;...;Xn | Z = z)`, each term evaluated
/// on the frames where `Z = z`.
pub fn conditional_mutual_information(
    streams: &[&LabelSequence],
    given: &LabelSequence,
    base: LogBase,
) -> Result<f64> {
    if streams.len() < 2 {
        return Err(Error::InvalidInput(
            "conditional mutual information needs at least 2 streams".into(),
        ));
    }
    let mut all = streams.to_vec();
    all.push(given);
    let len = check_aligned(&all)? as f64;
    let mut total = 0.0;
    for frames in partition_by(given) {
        let subs: Vec<LabelSequence> = streams.iter().map(|s| s.subset(&frames)).collect();
        let refs: Vec<&LabelSequence> = subs.iter().collect();
        total += frames.len() as f64 / len * multivariate_mi_recursive(&refs, base)?;
    }
    Ok(if streams.len() == 2 { clamp_mi(total) } else { total })
}

/// Multivariate mutual information by recursion on the last variable:
/// `I(X1;...;Xn) = I(X1;...;Xn-1) - I(X1;...;Xn-1 | Xn)`. May be negative for
/// three or more streams.
pub fn multivariate_mi_recursive(streams: &[&LabelSequence], base: LogBase) -> Result<f64> {
    check_aligned(streams)?;
    match streams.len() {
        0 | 1 => Err(Error::InvalidInput(
            "multivariate mutual information needs at least 2 streams".into(),
        )),
        2 => mutual_information(streams[0], streams[1], base),
        n => {
            let head = &streams[..n - 1];
            Ok(multivariate_mi_recursive(head, base)?
                - conditional_mutual_information(head, streams[n - 1], base)?)
        }
    }
}

/// Entropies of every non-empty subset of three streams.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Entropies3 {
    single: [f64; 3],
    /// `(0,1)`, `(0,2)`, `(1,2)`.
    pair: [f64; 3],
    all: f64,
}

impl Entropies3 {
    fn of(v: &LabelSequence, t: &LabelSequence, s: &LabelSequence, base: LogBase) -> Result<Self> {
        check_aligned(&[v, t, s])?;
        let h = |x: &[&LabelSequence]| joint_entropy(x, base);
        Ok(Self {
            single: [h(&[v])?, h(&[t])?, h(&[s])?],
            pair: [h(&[v, t])?, h(&[v, s])?, h(&[t, s])?],
            all: h(&[v, t, s])?,
        })
    }

    /// Inclusion-exclusion over the seven entropies.
    fn co_information(&self) -> f64 {
        self.single.iter().sum::<f64>() - self.pair.iter().sum::<f64>() + self.all
    }
}

/// Index pairs in the order used by [`InfoDiagram`] pair arrays.
pub const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// Tri-variate co-information from seven entropies:
/// `H(V)+H(T)+H(S) - H(T;V) - H(T;S) - H(V;S) + H(V;T;S)`.
pub fn trivariate_mmi(
    v: &LabelSequence,
    t: &LabelSequence,
    s: &LabelSequence,
    base: LogBase,
) -> Result<f64> {
    Ok(Entropies3::of(v, t, s, base)?.co_information())
}

/// Seven-region decomposition of three aligned streams.
///
/// Arrays indexed by variable follow the argument order of [`info_diagram`];
/// arrays indexed by pair follow [`PAIRS`].
#[derive(Debug, Clone, PartialEq)]
pub struct InfoDiagram {
    pub names: [String; 3],
    pub log_base: LogBase,
    pub entropies: [f64; 3],
    pub joint_pair_entropies: [f64; 3],
    pub joint_entropy: f64,
    pub mutual_information: [f64; 3],
    /// `conditional[x][y] = H(x | y)`; the diagonal is 0.
    pub conditional: [[f64; 3]; 3],
    pub center: f64,
    /// `I(x;y | z)` regions, `I(x;y) - center`.
    pub pairwise_regions: [f64; 3],
    /// `H(x | y, z)` regions.
    pub unique_regions: [f64; 3],
}

impl InfoDiagram {
    /// Sum of the regions lying inside variable `x`'s circle.
    pub fn circle_sum(&self, x: usize) -> f64 {
        let pairs: f64 = PAIRS
            .iter()
            .zip(self.pairwise_regions)
            .filter(|((a, b), _)| *a == x || *b == x)
            .map(|(_, r)| r)
            .sum();
        self.unique_regions[x] + pairs + self.center
    }
}

pub fn info_diagram(
    v: &LabelSequence,
    t: &LabelSequence,
    s: &LabelSequence,
    base: LogBase,
) -> Result<InfoDiagram> {
    let e = Entropies3::of(v, t, s, base)?;
    let center = e.co_information();
    let mut mi = [0.0; 3];
    let mut pairwise = [0.0; 3];
    let mut conditional = [[0.0; 3]; 3];
    for (p, &(a, b)) in PAIRS.iter().enumerate() {
        mi[p] = mi_from_entropies(e.single[a], e.single[b], e.pair[p]);
        pairwise[p] = mi[p] - center;
        conditional[a][b] = clamp_mi(e.pair[p] - e.single[b]);
        conditional[b][a] = clamp_mi(e.pair[p] - e.single[a]);
    }
    let mut unique = [0.0; 3];
    for (x, u) in unique.iter_mut().enumerate() {
        let touching: f64 = PAIRS
            .iter()
            .zip(pairwise)
            .filter(|((a, b), _)| *a == x || *b == x)
            .map(|(_, r)| r)
            .sum();
        *u = e.single[x] - (touching + center);
    }
    Ok(InfoDiagram {
        names: [v, t, s].map(|x| x.modality_tag().to_string()),
        log_base: base,
        entropies: e.single,
        joint_pair_entropies: e.pair,
        joint_entropy: e.all,
        mutual_information: mi,
        conditional,
        center,
        pairwise_regions: pairwise,
        unique_regions: unique,
    })
}

/// Key of a pairwise entry, e.g. `"T,S"`.
pub fn pair_key(a: &str, b: &str) -> String {
    format!("{a},{b}")
}

/// Key of a joint entropy entry, e.g. `"V;T;S"`.
pub fn joint_key(names: &[&str]) -> String {
    names.join(";")
}

/// Key of a conditional entropy entry, e.g. `"S|T"`.
pub fn cond_key(a: &str, given: &str) -> String {
    format!("{a}|{given}")
}

/// Keys of the seven diagram regions for names `[x, y, z]`: three unique
/// regions, then the pairwise regions in [`PAIRS`] order, then the center.
pub fn region_keys(names: [&str; 3]) -> [String; 7] {
    let [x, y, z] = names;
    [
        format!("H({x}|{y},{z})"),
        format!("H({y}|{x},{z})"),
        format!("H({z}|{x},{y})"),
        format!("I({x};{y}|{z})"),
        format!("I({x};{z}|{y})"),
        format!("I({y};{z}|{x})"),
        format!("I({x};{y};{z})"),
    ]
}

/// Named quantity table for two or more streams, as serialized in reports.
///
/// Tri-variate fields are present only for exactly three streams; `In` holds
/// the recursive multivariate MI when there are four or more.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfoQuantities {
    #[serde(rename = "H")]
    pub entropies: BTreeMap<String, f64>,
    #[serde(rename = "Hjoint")]
    pub joint_entropies: BTreeMap<String, f64>,
    #[serde(rename = "I2")]
    pub mutual_information: BTreeMap<String, f64>,
    #[serde(rename = "I3", default, skip_serializing_if = "Option::is_none")]
    pub trivariate_mmi: Option<f64>,
    #[serde(rename = "In", default, skip_serializing_if = "Option::is_none")]
    pub multivariate_mmi: Option<f64>,
    pub cond: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regions: Option<BTreeMap<String, f64>>,
    pub log_base: LogBase,
}

impl InfoQuantities {
    /// Estimates every quantity from aligned streams, named by their
    /// modality tags.
    pub fn from_streams(streams: &[&LabelSequence], base: LogBase) -> Result<Self> {
        check_aligned(streams)?;
        if streams.len() < 2 {
            return Err(Error::InvalidInput("need at least 2 streams".into()));
        }
        let names: Vec<&str> = streams.iter().map(|s| s.modality_tag()).collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::InvalidInput(format!("duplicate stream name {n:?}")));
            }
        }
        if let [v, t, s] = streams {
            return Ok(Self::from_diagram(&info_diagram(v, t, s, base)?));
        }
        let mut q = Self::empty(base);
        let h: Vec<f64> = streams
            .iter()
            .map(|s| joint_entropy(&[s], base))
            .collect::<Result<_>>()?;
        for (i, name) in names.iter().enumerate() {
            q.entropies.insert(name.to_string(), h[i]);
        }
        for i in 0..streams.len() {
            for j in i + 1..streams.len() {
                let h_ij = joint_entropy(&[streams[i], streams[j]], base)?;
                q.joint_entropies.insert(joint_key(&[names[i], names[j]]), h_ij);
                q.mutual_information
                    .insert(pair_key(names[i], names[j]), mi_from_entropies(h[i], h[j], h_ij));
                q.cond.insert(cond_key(names[i], names[j]), clamp_mi(h_ij - h[j]));
                q.cond.insert(cond_key(names[j], names[i]), clamp_mi(h_ij - h[i]));
            }
        }
        if streams.len() > 3 {
            q.joint_entropies
                .insert(joint_key(&names), joint_entropy(streams, base)?);
            q.multivariate_mmi = Some(multivariate_mi_recursive(streams, base)?);
        }
        Ok(q)
    }

    fn empty(base: LogBase) -> Self {
        Self {
            entropies: BTreeMap::new(),
            joint_entropies: BTreeMap::new(),
            mutual_information: BTreeMap::new(),
            trivariate_mmi: None,
            multivariate_mmi: None,
            cond: BTreeMap::new(),
            regions: None,
            log_base: base,
        }
    }

    pub fn from_diagram(d: &InfoDiagram) -> Self {
        let n: [&str; 3] = [&d.names[0], &d.names[1], &d.names[2]];
        let mut q = Self::empty(d.log_base);
        for (name, &h) in n.iter().zip(&d.entropies) {
            q.entropies.insert(name.to_string(), h);
        }
        for (p, &(a, b)) in PAIRS.iter().enumerate() {
            q.joint_entropies
                .insert(joint_key(&[n[a], n[b]]), d.joint_pair_entropies[p]);
            q.mutual_information
                .insert(pair_key(n[a], n[b]), d.mutual_information[p]);
            q.cond.insert(cond_key(n[a], n[b]), d.conditional[a][b]);
            q.cond.insert(cond_key(n[b], n[a]), d.conditional[b][a]);
        }
        q.joint_entropies.insert(joint_key(&n), d.joint_entropy);
        q.trivariate_mmi = Some(d.center);
        let keys = region_keys(n);
        let values = [
            d.unique_regions[0],
            d.unique_regions[1],
            d.unique_regions[2],
            d.pairwise_regions[0],
            d.pairwise_regions[1],
            d.pairwise_regions[2],
            d.center,
        ];
        q.regions = Some(keys.into_iter().zip(values).collect());
        q
    }

    /// Entropy of a named stream.
    pub fn h(&self, name: &str) -> Option<f64> {
        self.entropies.get(name).copied()
    }

    /// Mutual information of two named streams, in either order.
    pub fn mi(&self, a: &str, b: &str) -> Option<f64> {
        self.mutual_information
            .get(&pair_key(a, b))
            .or_else(|| self.mutual_information.get(&pair_key(b, a)))
            .copied()
    }

    /// Every scalar as `(key, value)`, keys prefixed by their table.
    pub fn flatten(&self) -> Vec<(String, f64)> {
        let mut out = Vec::new();
        let tables = [
            ("H", &self.entropies),
            ("Hjoint", &self.joint_entropies),
            ("I2", &self.mutual_information),
            ("cond", &self.cond),
        ];
        for (prefix, table) in tables {
            out.extend(table.iter().map(|(k, v)| (format!("{prefix}:{k}"), *v)));
        }
        if let Some(v) = self.trivariate_mmi {
            out.push(("I3".into(), v));
        }
        if let Some(v) = self.multivariate_mmi {
            out.push(("In".into(), v));
        }
        if let Some(r) = &self.regions {
            out.extend(r.iter().map(|(k, v)| (format!("regions:{k}"), *v)));
        }
        out
    }

    /// Largest absolute difference over all quantities, or `None` when the
    /// two tables do not hold the same keys.
    pub fn max_abs_diff(&self, other: &Self) -> Option<f64> {
        let a = self.flatten();
        let b = other.flatten();
        if a.len() != b.len() || a.iter().zip(&b).any(|(x, y)| x.0 != y.0) {
            return None;
        }
        Some(
            a.iter()
                .zip(&b)
                .map(|(x, y)| (x.1 - y.1).abs())
                .fold(0.0, f64::max),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const B2: LogBase = LogBase::Two;

    fn seq(symbols: &[u32], tag: &str) -> LabelSequence {
        LabelSequence::from_symbols(symbols.to_vec(), 25.0, tag).unwrap()
    }

    fn xor() -> (LabelSequence, LabelSequence, LabelSequence) {
        (
            seq(&[0, 0, 1, 1], "V"),
            seq(&[0, 1, 0, 1], "T"),
            seq(&[0, 1, 1, 0], "S"),
        )
    }

    #[test]
    fn joint_counts_examples() {
        let a = seq(&[0, 0, 1], "a");
        let b = seq(&[1, 1, 0], "b");
        let d = joint_counts(&[&a, &b]).unwrap();
        assert_eq!(d.total(), 3);
        let expected: BTreeMap<Vec<u32>, u64> =
            [(vec![0, 1], 2), (vec![1, 0], 1)].into_iter().collect();
        assert_eq!(d.counts(), &expected);

        let d = joint_counts(&[&seq(&[0, 1, 0, 1], "x")]).unwrap();
        assert_eq!(d.counts().values().copied().collect::<Vec<_>>(), vec![2, 2]);

        let c = seq(&[2, 2, 2, 2, 2], "c");
        let d = joint_counts(&[&c, &c, &c]).unwrap();
        assert_eq!(d.support_size(), 1);
        assert_eq!(d.counts()[&vec![2, 2, 2]], 5);

        assert!(matches!(
            joint_counts(&[&a, &c]),
            Err(Error::Misaligned(_))
        ));
    }

    #[test]
    fn marginal_sums_out() {
        let (v, t, s) = xor();
        let d = joint_counts(&[&v, &t, &s]).unwrap();
        let m = d.marginal(&[2]).unwrap();
        assert_eq!(m.counts()[&vec![0]], 2);
        assert_eq!(m.counts()[&vec![1]], 2);
        assert!(d.marginal(&[3]).is_err());
    }

    #[test]
    fn entropy_examples() {
        let d = JointDistribution::from_counts(1, [(vec![0], 1), (vec![1], 1)]).unwrap();
        assert_eq!(entropy(&d, B2), 1.0);
        let d = JointDistribution::from_counts(1, [(vec![0], 4)]).unwrap();
        assert_eq!(entropy(&d, B2), 0.0);
        let d = JointDistribution::from_counts(1, [(vec![0], 1), (vec![1], 1), (vec![2], 2)])
            .unwrap();
        assert!((entropy(&d, B2) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn mutual_information_examples() {
        let a = seq(&[0, 1, 0, 1], "a");
        assert!((mutual_information(&a, &a, B2).unwrap() - 1.0).abs() < 1e-15);
        let a = seq(&[0, 0, 1, 1], "a");
        let b = seq(&[0, 1, 0, 1], "b");
        assert_eq!(mutual_information(&a, &b, B2).unwrap(), 0.0);
        let b = seq(&[1, 1, 0, 0], "b");
        assert!((mutual_information(&a, &b, B2).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn conditional_entropy_examples() {
        let a = seq(&[0, 0, 1, 1, 0, 1], "a");
        assert_eq!(conditional_entropy(&a, &[&a], B2).unwrap(), 0.0);

        let a = seq(&[0, 0, 1, 1], "a");
        let b = seq(&[0, 1, 0, 1], "b");
        let h_a = joint_entropy(&[&a], B2).unwrap();
        assert!((conditional_entropy(&a, &[&b], B2).unwrap() - h_a).abs() < 1e-15);

        let (x, y, z) = xor();
        assert!(conditional_entropy(&z, &[&x, &y], B2).unwrap().abs() < 1e-15);
    }

    #[test]
    fn conditional_mi_examples() {
        let a = seq(&[0, 1, 1, 0, 1, 0, 0, 0], "a");
        let b = seq(&[1, 1, 0, 0, 1, 0, 1, 1], "b");
        let z = LabelSequence::new(vec![0; 8], 1, 25.0, "z").unwrap();
        let cmi = conditional_mutual_information(&[&a, &b], &z, B2).unwrap();
        assert_eq!(cmi, mutual_information(&a, &b, B2).unwrap());

        // Within each z block, a and b take every combination once.
        let a = seq(&[0, 0, 1, 1, 2, 2, 3, 3], "a");
        let b = seq(&[0, 1, 0, 1, 5, 6, 5, 6], "b");
        let z = seq(&[0, 0, 0, 0, 1, 1, 1, 1], "z");
        assert_eq!(conditional_mutual_information(&[&a, &b], &z, B2).unwrap(), 0.0);

        let (x, y, z) = xor();
        let cmi = conditional_mutual_information(&[&x, &y], &z, B2).unwrap();
        assert!((cmi - 1.0).abs() < 1e-15);
    }

    #[test]
    fn recursive_mmi_examples() {
        let (v, t, s) = xor();
        assert_eq!(
            multivariate_mi_recursive(&[&v, &t], B2).unwrap(),
            mutual_information(&v, &t, B2).unwrap()
        );
        assert!((multivariate_mi_recursive(&[&v, &t, &s], B2).unwrap() + 1.0).abs() < 1e-15);

        let a = seq(&[0, 1, 2, 2], "a");
        let h = joint_entropy(&[&a], B2).unwrap();
        let mmi = multivariate_mi_recursive(&[&a, &a, &a], B2).unwrap();
        assert!((mmi - h).abs() < 1e-12);
        assert!(multivariate_mi_recursive(&[&a], B2).is_err());
    }

    #[test]
    fn trivariate_examples() {
        let (v, t, s) = xor();
        assert!((trivariate_mmi(&v, &t, &s, B2).unwrap() + 1.0).abs() < 1e-15);
        let c = seq(&[0, 1, 0, 1], "c");
        assert!((trivariate_mmi(&c, &c, &c, B2).unwrap() - 1.0).abs() < 1e-15);
        let k0 = LabelSequence::new(vec![0; 4], 1, 25.0, "k0").unwrap();
        let k1 = LabelSequence::new(vec![0; 4], 1, 25.0, "k1").unwrap();
        assert_eq!(trivariate_mmi(&k0, &c, &k1, B2).unwrap(), 0.0);
    }

    #[test]
    fn diagram_examples() {
        let (v, t, s) = xor();
        let d = info_diagram(&v, &t, &s, B2).unwrap();
        for x in 0..3 {
            assert!(d.unique_regions[x].abs() < 1e-15);
            assert!((d.pairwise_regions[x] - 1.0).abs() < 1e-15);
            assert!((d.circle_sum(x) - d.entropies[x]).abs() < 1e-12);
        }
        assert!((d.center + 1.0).abs() < 1e-15);

        // All 8 combinations of three bits: mutually independent.
        let v = seq(&[0, 0, 0, 0, 1, 1, 1, 1], "V");
        let t = seq(&[0, 0, 1, 1, 0, 0, 1, 1], "T");
        let s = seq(&[0, 1, 0, 1, 0, 1, 0, 1], "S");
        let d = info_diagram(&v, &t, &s, B2).unwrap();
        assert!(d.center.abs() < 1e-15);
        for x in 0..3 {
            assert!(d.pairwise_regions[x].abs() < 1e-15);
            assert!((d.unique_regions[x] - 1.0).abs() < 1e-15);
        }

        let a = seq(&[0, 1, 2, 2], "a");
        let d = info_diagram(&a, &a.clone().with_tag("b"), &a.clone().with_tag("c"), B2).unwrap();
        let h = d.entropies[0];
        assert!((d.center - h).abs() < 1e-12);
        for x in 0..3 {
            assert!(d.unique_regions[x].abs() < 1e-12);
            assert!(d.pairwise_regions[x].abs() < 1e-12);
        }
    }

    #[test]
    fn quantities_table_shape() {
        let (v, t, s) = xor();
        let q = InfoQuantities::from_streams(&[&v, &t, &s], B2).unwrap();
        assert_eq!(q.entropies.len(), 3);
        assert_eq!(q.mutual_information.len(), 3);
        assert_eq!(q.cond.len(), 6);
        assert_eq!(q.regions.as_ref().unwrap().len(), 7);
        assert!((q.trivariate_mmi.unwrap() + 1.0).abs() < 1e-15);
        assert!((q.regions.as_ref().unwrap()["I(V;T;S)"] + 1.0).abs() < 1e-15);

        let q = InfoQuantities::from_streams(&[&t, &s], B2).unwrap();
        assert!(q.trivariate_mmi.is_none() && q.regions.is_none());
        assert_eq!(q.mi("S", "T"), Some(0.0));

        let dup = t.clone();
        assert!(InfoQuantities::from_streams(&[&t, &dup], B2).is_err());
    }

    #[test]
    fn log_base_parsing() {
        for b in [LogBase::Two, LogBase::E, LogBase::Ten] {
            assert_eq!(b.to_string().parse::<LogBase>().unwrap(), b);
            let json = serde_json::to_string(&b).unwrap();
            assert_eq!(serde_json::from_str::<LogBase>(&json).unwrap(), b);
        }
        assert!("3".parse::<LogBase>().is_err());
    }
}
