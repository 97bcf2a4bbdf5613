//! End-to-end analysis: align, quantize continuous streams with their own
//! codebooks, then estimate every quantity over the aligned cluster ids.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::infotheory::{InfoQuantities, LogBase};
use crate::ingestion::{align_streams, LabelSequence, Manifest, Stream, StreamKind};
use crate::quantizer::{fit_with_labels, FitParams};
use crate::rng::RNG_ALGORITHM;

pub const REPORT_FORMAT: &str = "modmi-report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    /// Common frame rate; `None` uses the manifest's `target_rate_hz`.
    pub target_rate_hz: Option<f64>,
    /// Cluster count for continuous streams without a manifest override.
    pub clusters: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_iter: usize,
    pub normalize: bool,
    pub log_base: LogBase,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            target_rate_hz: None,
            clusters: 2000,
            seed: 0,
            tol: 1e-4,
            max_iter: 300,
            normalize: false,
            log_base: LogBase::Two,
        }
    }
}

impl AnalysisConfig {
    fn validate(&self) -> Result<()> {
        if self.clusters == 0 {
            return Err(Error::InvalidInput("clusters must be at least 1".into()));
        }
        if let Some(r) = self.target_rate_hz {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "target rate must be positive, got {r}"
                )));
            }
        }
        Ok(())
    }
}

/// Which modality of the audio-visual-text triple a stream plays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Role {
    V,
    T,
    S,
}

impl Role {
    fn from_alias(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "v" | "video" | "visual" | "lip" | "lips" => Some(Role::V),
            "t" | "text" | "label" | "labels" | "phone" | "phones" | "phoneme" | "phonemes" => {
                Some(Role::T)
            }
            "s" | "speech" | "audio" => Some(Role::S),
            _ => None,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Role::V => "V",
            Role::T => "T",
            Role::S => "S",
        }
    }
}

/// Roles for up to three streams: names that match a known alias first,
/// then label streams take `T` and feature streams `S` then `V`, then
/// whatever is left in manifest order.
pub fn assign_roles(streams: &[(&str, StreamKind)]) -> Vec<Option<Role>> {
    let mut roles: Vec<Option<Role>> = vec![None; streams.len()];
    if streams.len() > 3 {
        return roles;
    }
    let mut free = vec![Role::T, Role::S, Role::V];
    for (i, (name, _)) in streams.iter().enumerate() {
        if let Some(r) = Role::from_alias(name) {
            if let Some(pos) = free.iter().position(|&f| f == r) {
                free.remove(pos);
                roles[i] = Some(r);
            }
        }
    }
    let preferences: [(StreamKind, &[Role]); 2] = [
        (StreamKind::Labels, &[Role::T]),
        (StreamKind::Features, &[Role::S, Role::V]),
    ];
    for (kind, prefs) in preferences {
        for (i, (_, k)) in streams.iter().enumerate() {
            if roles[i].is_some() || *k != kind {
                continue;
            }
            if let Some(pos) = free.iter().position(|f| prefs.contains(f)) {
                roles[i] = Some(free.remove(pos));
            }
        }
    }
    for role in roles.iter_mut().filter(|r| r.is_none()) {
        *role = Some(free.remove(0));
    }
    roles
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamReport {
    pub name: String,
    pub kind: StreamKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<Role>,
    pub source_rate_hz: f64,
    /// Aligned frame count.
    #[serde(rename = "L")]
    pub frames: usize,
    #[serde(rename = "d", default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<usize>,
    #[serde(rename = "k", default, skip_serializing_if = "Option::is_none")]
    pub clusters: Option<usize>,
    pub alphabet_size: u32,
    /// Distinct symbols actually observed after alignment.
    pub distinct_symbols: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_distortion: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codebook_sha256: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfoReport {
    pub format: String,
    pub rng: String,
    /// Effective configuration; `target_rate_hz` is always resolved.
    pub config: AnalysisConfig,
    pub streams: Vec<StreamReport>,
    pub quantities: InfoQuantities,
}

impl InfoReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::Format(format!("report: {e}")))
    }

    pub fn stream(&self, name: &str) -> Option<&StreamReport> {
        self.streams.iter().find(|s| s.name == name)
    }

    /// Name of the stream playing `role`.
    pub fn role_name(&self, role: Role) -> Option<&str> {
        self.streams
            .iter()
            .find(|s| s.role == Some(role))
            .map(|s| s.name.as_str())
    }
}

/// Streams loaded and aligned once, reusable across cluster counts.
struct Prepared {
    streams: Vec<Stream>,
    kinds: Vec<StreamKind>,
    overrides: Vec<Option<usize>>,
    roles: Vec<Option<Role>>,
    source_rates: Vec<f64>,
    names: Vec<String>,
    rate: f64,
}

fn prepare(manifest: &Manifest, config: &AnalysisConfig) -> Result<Prepared> {
    config.validate()?;
    if manifest.streams.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "analysis needs at least 2 streams, manifest has {}",
            manifest.streams.len()
        )));
    }
    let rate = config.target_rate_hz.unwrap_or(manifest.target_rate_hz);
    let loaded = manifest
        .streams
        .iter()
        .map(|s| s.load())
        .collect::<Result<Vec<_>>>()?;
    let streams = align_streams(&loaded, rate)?;
    let names: Vec<String> = manifest.streams.iter().map(|s| s.name.clone()).collect();
    let kinds: Vec<StreamKind> = manifest.streams.iter().map(|s| s.kind).collect();
    let pairs: Vec<(&str, StreamKind)> =
        names.iter().map(String::as_str).zip(kinds.iter().copied()).collect();
    Ok(Prepared {
        roles: assign_roles(&pairs),
        overrides: manifest.streams.iter().map(|s| s.clusters).collect(),
        source_rates: manifest.streams.iter().map(|s| s.sample_rate_hz).collect(),
        streams,
        kinds,
        names,
        rate,
    })
}

fn run(prepared: &Prepared, config: &AnalysisConfig, forced_k: Option<usize>) -> Result<InfoReport> {
    struct Quantized {
        labels: LabelSequence,
        report: StreamReport,
    }

    let quantized = prepared
        .streams
        .par_iter()
        .enumerate()
        .map(|(i, stream)| -> Result<Quantized> {
            let name = &prepared.names[i];
            let mut report = StreamReport {
                name: name.clone(),
                kind: prepared.kinds[i],
                role: prepared.roles[i],
                source_rate_hz: prepared.source_rates[i],
                frames: stream.len(),
                dims: None,
                clusters: None,
                alphabet_size: 0,
                distinct_symbols: 0,
                iterations: None,
                final_distortion: None,
                codebook_sha256: None,
            };
            let labels = match stream {
                Stream::Labels(l) => l.clone(),
                Stream::Features(x) => {
                    let k = forced_k
                        .or(prepared.overrides[i])
                        .unwrap_or(config.clusters);
                    let params = FitParams {
                        k,
                        seed: config.seed,
                        tol: config.tol,
                        max_iter: config.max_iter,
                        normalize: config.normalize,
                    };
                    let (cb, ids) = fit_with_labels(x, &params).map_err(|e| e.in_stream(name))?;
                    report.dims = Some(x.dims());
                    report.clusters = Some(k);
                    report.iterations = cb.iterations_run();
                    report.final_distortion = cb.final_distortion();
                    report.codebook_sha256 = Some(cb.digest());
                    LabelSequence::new(ids, k as u32, x.sample_rate_hz(), name.clone())?
                }
            };
            report.alphabet_size = labels.alphabet_size();
            report.distinct_symbols = labels.distinct_symbols();
            Ok(Quantized { labels, report })
        })
        .collect::<Result<Vec<_>>>()?;

    // Canonical V, T, S order when every stream has a role.
    let mut order: Vec<usize> = (0..quantized.len()).collect();
    if prepared.roles.iter().all(Option::is_some) {
        order.sort_by_key(|&i| prepared.roles[i]);
    }
    let refs: Vec<&LabelSequence> = order.iter().map(|&i| &quantized[i].labels).collect();
    let quantities = InfoQuantities::from_streams(&refs, config.log_base)?;

    let mut effective = config.clone();
    effective.target_rate_hz = Some(prepared.rate);
    if let Some(k) = forced_k {
        effective.clusters = k;
    }
    Ok(InfoReport {
        format: REPORT_FORMAT.into(),
        rng: RNG_ALGORITHM.into(),
        config: effective,
        streams: quantized.into_iter().map(|q| q.report).collect(),
        quantities,
    })
}

/// Runs the full estimation over the streams of a manifest.
pub fn analyze(manifest: &Manifest, config: &AnalysisConfig) -> Result<InfoReport> {
    run(&prepare(manifest, config)?, config, None)
}

/// One report per cluster count. Each `k` applies to every continuous
/// stream, overriding manifest cluster counts; label streams are untouched.
pub fn sweep_clusters(
    manifest: &Manifest,
    config: &AnalysisConfig,
    ks: &[usize],
) -> Result<Vec<InfoReport>> {
    if ks.is_empty() {
        return Err(Error::InvalidInput("cluster sweep needs at least one k".into()));
    }
    if ks.contains(&0) {
        return Err(Error::InvalidInput("cluster counts must be at least 1".into()));
    }
    let prepared = prepare(manifest, config)?;
    ks.iter().map(|&k| run(&prepared, config, Some(k))).collect()
}
