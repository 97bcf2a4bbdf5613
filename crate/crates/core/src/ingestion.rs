//! Stream data model, on-disk formats and frame-rate alignment.
//!
//! File formats (all integers and floats little-endian):
//!
//! | file | layout |
//! |------|--------|
//! | FMX1 | `"FMX1"`, rows `u32`, dims `u32`, rows×dims `f32` row-major |
//! | LBL1 | `"LBL1"`, rows `u32`, alphabet_size `u32`, rows×`u32` symbols |
//!
//! Label files may also be plain text, one decimal symbol per line.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FMX_MAGIC: &[u8; 4] = b"FMX1";
pub const LBL_MAGIC: &[u8; 4] = b"LBL1";
pub const FMX_HEADER_LEN: usize = 12;
pub const LBL_HEADER_LEN: usize = 12;

/// Rate assigned to streams read without a manifest.
pub const DEFAULT_RATE_HZ: f64 = 25.0;

fn check_rate(rate: f64) -> Result<()> {
    if rate.is_finite() && rate > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "sample rate must be positive and finite, got {rate}"
        )))
    }
}

/// A continuous `rows × dims` feature stream for one modality.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    dims: usize,
    values: Vec<f32>,
    sample_rate_hz: f64,
    modality_tag: String,
}

impl FeatureMatrix {
    pub fn new(
        rows: usize,
        dims: usize,
        values: Vec<f32>,
        sample_rate_hz: f64,
        modality_tag: impl Into<String>,
    ) -> Result<Self> {
        if rows == 0 || dims == 0 {
            return Err(Error::InvalidInput(format!(
                "feature matrix must be at least 1x1, got {rows}x{dims}"
            )));
        }
        if values.len() != rows * dims {
            return Err(Error::InvalidInput(format!(
                "{rows}x{dims} matrix needs {} values, got {}",
                rows * dims,
                values.len()
            )));
        }
        check_rate(sample_rate_hz)?;
        check_finite(&values, dims)?;
        Ok(Self {
            rows,
            dims,
            values,
            sample_rate_hz,
            modality_tag: modality_tag.into(),
        })
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows(
        rows: &[Vec<f32>],
        sample_rate_hz: f64,
        modality_tag: impl Into<String>,
    ) -> Result<Self> {
        let dims = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dims) {
            return Err(Error::InvalidInput("ragged rows".into()));
        }
        let values = rows.iter().flatten().copied().collect();
        Self::new(rows.len(), dims, values, sample_rate_hz, modality_tag)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.values[i * self.dims..(i + 1) * self.dims]
    }

    pub fn iter_rows(&self) -> std::slice::ChunksExact<'_, f32> {
        self.values.chunks_exact(self.dims)
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn modality_tag(&self) -> &str {
        &self.modality_tag
    }

    pub fn with_sample_rate(mut self, rate: f64) -> Result<Self> {
        check_rate(rate)?;
        self.sample_rate_hz = rate;
        Ok(self)
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.modality_tag = tag.into();
        self
    }

    fn select(&self, indices: &[usize], rate: f64) -> Self {
        let mut values = Vec::with_capacity(indices.len() * self.dims);
        for &j in indices {
            values.extend_from_slice(self.row(j));
        }
        Self {
            rows: indices.len(),
            dims: self.dims,
            values,
            sample_rate_hz: rate,
            modality_tag: self.modality_tag.clone(),
        }
    }

    /// Keeps the first `len` frames.
    pub fn truncated(&self, len: usize) -> Self {
        let len = len.min(self.rows);
        Self {
            rows: len,
            dims: self.dims,
            values: self.values[..len * self.dims].to_vec(),
            sample_rate_hz: self.sample_rate_hz,
            modality_tag: self.modality_tag.clone(),
        }
    }
}

fn check_finite(values: &[f32], dims: usize) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::NonFinite {
            row: i / dims,
            col: i % dims,
        }),
        None => Ok(()),
    }
}

/// A discrete symbol stream: phone labels, or cluster ids of a quantized
/// feature stream.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelSequence {
    symbols: Vec<u32>,
    alphabet_size: u32,
    sample_rate_hz: f64,
    modality_tag: String,
}

impl LabelSequence {
    pub fn new(
        symbols: Vec<u32>,
        alphabet_size: u32,
        sample_rate_hz: f64,
        modality_tag: impl Into<String>,
    ) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidInput("label sequence is empty".into()));
        }
        check_rate(sample_rate_hz)?;
        if let Some((i, &s)) = symbols
            .iter()
            .enumerate()
            .find(|(_, &s)| s >= alphabet_size)
        {
            return Err(Error::InvalidInput(format!(
                "symbol {s} at frame {i} is outside alphabet of size {alphabet_size}"
            )));
        }
        Ok(Self {
            symbols,
            alphabet_size,
            sample_rate_hz,
            modality_tag: modality_tag.into(),
        })
    }

    /// Alphabet size is one more than the largest symbol.
    pub fn from_symbols(
        symbols: Vec<u32>,
        sample_rate_hz: f64,
        modality_tag: impl Into<String>,
    ) -> Result<Self> {
        let max = symbols.iter().copied().max().ok_or_else(|| {
            Error::InvalidInput("label sequence is empty".into())
        })?;
        let alphabet = max.checked_add(1).ok_or_else(|| {
            Error::InvalidInput("symbol u32::MAX leaves no room for an alphabet size".into())
        })?;
        Self::new(symbols, alphabet, sample_rate_hz, modality_tag)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    pub fn alphabet_size(&self) -> u32 {
        self.alphabet_size
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn modality_tag(&self) -> &str {
        &self.modality_tag
    }

    /// Raises the alphabet size; shrinking below an observed symbol is an
    /// error.
    pub fn with_alphabet_size(mut self, alphabet_size: u32) -> Result<Self> {
        let needed = self.symbols.iter().copied().max().unwrap_or(0) + 1;
        if alphabet_size < needed {
            return Err(Error::InvalidInput(format!(
                "alphabet size {alphabet_size} is smaller than observed {needed}"
            )));
        }
        self.alphabet_size = alphabet_size;
        Ok(self)
    }

    pub fn with_sample_rate(mut self, rate: f64) -> Result<Self> {
        check_rate(rate)?;
        self.sample_rate_hz = rate;
        Ok(self)
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.modality_tag = tag.into();
        self
    }

    /// Number of distinct symbols actually present.
    pub fn distinct_symbols(&self) -> usize {
        let mut seen = self.symbols.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    fn select(&self, indices: &[usize], rate: f64) -> Self {
        Self {
            symbols: indices.iter().map(|&j| self.symbols[j]).collect(),
            alphabet_size: self.alphabet_size,
            sample_rate_hz: rate,
            modality_tag: self.modality_tag.clone(),
        }
    }

    /// Keeps the frames at `indices`, in order.
    pub(crate) fn subset(&self, indices: &[usize]) -> Self {
        self.select(indices, self.sample_rate_hz)
    }

    pub fn truncated(&self, len: usize) -> Self {
        let len = len.min(self.symbols.len());
        Self {
            symbols: self.symbols[..len].to_vec(),
            alphabet_size: self.alphabet_size,
            sample_rate_hz: self.sample_rate_hz,
            modality_tag: self.modality_tag.clone(),
        }
    }
}

/// Source frame indices selected by nearest-frame resampling.
///
/// Output length is `max(1, round(len * target / source))` and output frame
/// `i` copies source frame `min(len - 1, floor((i + 0.5) * source / target))`.
pub fn resample_indices(len: usize, source_rate_hz: f64, target_rate_hz: f64) -> Vec<usize> {
    if len == 0 {
        return Vec::new();
    }
    if source_rate_hz == target_rate_hz {
        return (0..len).collect();
    }
    let out_len = ((len as f64 * target_rate_hz / source_rate_hz).round() as usize).max(1);
    let ratio = source_rate_hz / target_rate_hz;
    (0..out_len)
        .map(|i| (((i as f64 + 0.5) * ratio).floor() as usize).min(len - 1))
        .collect()
}

/// Streams that can be resampled frame-wise.
pub trait Resample: Sized {
    fn frame_count(&self) -> usize;
    fn rate_hz(&self) -> f64;
    fn pick_frames(&self, indices: &[usize], rate: f64) -> Self;
}

impl Resample for FeatureMatrix {
    fn frame_count(&self) -> usize {
        self.rows
    }
    fn rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }
    fn pick_frames(&self, indices: &[usize], rate: f64) -> Self {
        self.select(indices, rate)
    }
}

impl Resample for LabelSequence {
    fn frame_count(&self) -> usize {
        self.symbols.len()
    }
    fn rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }
    fn pick_frames(&self, indices: &[usize], rate: f64) -> Self {
        self.select(indices, rate)
    }
}

/// Nearest-frame decimation or replication to `target_rate_hz`.
pub fn resample_nearest<S: Resample + Clone>(stream: &S, target_rate_hz: f64) -> Result<S> {
    check_rate(target_rate_hz)?;
    if stream.rate_hz() == target_rate_hz {
        return Ok(stream.clone());
    }
    let idx = resample_indices(stream.frame_count(), stream.rate_hz(), target_rate_hz);
    Ok(stream.pick_frames(&idx, target_rate_hz))
}

/// Label streams sharing one frame rate and one length.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedDataset {
    streams: Vec<LabelSequence>,
}

impl AlignedDataset {
    /// Wraps streams that are already aligned.
    pub fn new(streams: Vec<LabelSequence>) -> Result<Self> {
        let first = streams
            .first()
            .ok_or_else(|| Error::InvalidInput("aligned dataset needs a stream".into()))?;
        let (len, rate) = (first.len(), first.sample_rate_hz());
        if streams
            .iter()
            .any(|s| s.len() != len || s.sample_rate_hz() != rate)
        {
            return Err(Error::Misaligned(streams.iter().map(|s| s.len()).collect()));
        }
        Ok(Self { streams })
    }

    pub fn len(&self) -> usize {
        self.streams[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.streams[0].sample_rate_hz()
    }

    pub fn streams(&self) -> &[LabelSequence] {
        &self.streams
    }

    pub fn into_streams(self) -> Vec<LabelSequence> {
        self.streams
    }

    pub fn get(&self, name: &str) -> Option<&LabelSequence> {
        self.streams.iter().find(|s| s.modality_tag() == name)
    }
}

/// Resamples every stream to `target_rate_hz` and truncates all of them to
/// the shortest resulting length.
pub fn align(streams: &[LabelSequence], target_rate_hz: f64) -> Result<AlignedDataset> {
    if streams.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "alignment needs at least 2 streams, got {}",
            streams.len()
        )));
    }
    let resampled = streams
        .iter()
        .map(|s| resample_nearest(s, target_rate_hz))
        .collect::<Result<Vec<_>>>()?;
    let common = common_length(resampled.iter().map(|s| s.len()))?;
    AlignedDataset::new(resampled.iter().map(|s| s.truncated(common)).collect())
}

pub(crate) fn common_length(lengths: impl Iterator<Item = usize>) -> Result<usize> {
    let lengths: Vec<usize> = lengths.collect();
    let min = lengths.iter().copied().min().unwrap_or(0);
    if min == 0 {
        return Err(Error::Misaligned(lengths));
    }
    if lengths.iter().any(|&l| l != min) {
        log::info!("truncating streams of lengths {lengths:?} to {min} frames");
    }
    Ok(min)
}

/// A stream of either kind, as loaded from a manifest entry.
#[derive(Debug, Clone, PartialEq)]
pub enum Stream {
    Features(FeatureMatrix),
    Labels(LabelSequence),
}

impl Stream {
    pub fn len(&self) -> usize {
        match self {
            Stream::Features(m) => m.rows(),
            Stream::Labels(l) => l.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn resampled(&self, target_rate_hz: f64) -> Result<Self> {
        Ok(match self {
            Stream::Features(m) => Stream::Features(resample_nearest(m, target_rate_hz)?),
            Stream::Labels(l) => Stream::Labels(resample_nearest(l, target_rate_hz)?),
        })
    }

    pub fn truncated(&self, len: usize) -> Self {
        match self {
            Stream::Features(m) => Stream::Features(m.truncated(len)),
            Stream::Labels(l) => Stream::Labels(l.truncated(len)),
        }
    }
}

/// [`align`] for streams of mixed kinds.
pub fn align_streams(streams: &[Stream], target_rate_hz: f64) -> Result<Vec<Stream>> {
    let resampled = streams
        .iter()
        .map(|s| s.resampled(target_rate_hz))
        .collect::<Result<Vec<_>>>()?;
    let common = common_length(resampled.iter().map(Stream::len))?;
    Ok(resampled.iter().map(|s| s.truncated(common)).collect())
}

fn read_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap())
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn tag_from_path(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

pub fn decode_feature_matrix(bytes: &[u8]) -> Result<FeatureMatrix> {
    if bytes.len() < FMX_HEADER_LEN {
        return Err(Error::SizeMismatch {
            expected: FMX_HEADER_LEN as u64,
            actual: bytes.len() as u64,
        });
    }
    if &bytes[..4] != FMX_MAGIC {
        return Err(Error::Format(format!(
            "expected magic FMX1, found {:?}",
            String::from_utf8_lossy(&bytes[..4])
        )));
    }
    let rows = read_u32(bytes, 4) as usize;
    let dims = read_u32(bytes, 8) as usize;
    let expected = FMX_HEADER_LEN as u64 + rows as u64 * dims as u64 * 4;
    if bytes.len() as u64 != expected {
        return Err(Error::SizeMismatch {
            expected,
            actual: bytes.len() as u64,
        });
    }
    let values = bytes[FMX_HEADER_LEN..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    FeatureMatrix::new(rows, dims, values, DEFAULT_RATE_HZ, "")
}

pub fn encode_feature_matrix(m: &FeatureMatrix) -> Result<Vec<u8>> {
    check_finite(&m.values, m.dims)?;
    let rows = u32::try_from(m.rows).map_err(|_| Error::InvalidInput("too many rows".into()))?;
    let dims = u32::try_from(m.dims).map_err(|_| Error::InvalidInput("too many dims".into()))?;
    let mut out = Vec::with_capacity(FMX_HEADER_LEN + m.values.len() * 4);
    out.extend_from_slice(FMX_MAGIC);
    out.extend_from_slice(&rows.to_le_bytes());
    out.extend_from_slice(&dims.to_le_bytes());
    for v in &m.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

/// Reads an FMX1 file. The sample rate defaults to [`DEFAULT_RATE_HZ`] and
/// the modality tag to the file stem.
pub fn read_feature_matrix(path: impl AsRef<Path>) -> Result<FeatureMatrix> {
    let path = path.as_ref();
    Ok(decode_feature_matrix(&read_file(path)?)?.with_tag(tag_from_path(path)))
}

pub fn write_feature_matrix(m: &FeatureMatrix, path: impl AsRef<Path>) -> Result<()> {
    let bytes = encode_feature_matrix(m)?;
    write_bytes(path.as_ref(), &bytes)
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(bytes)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn decode_labels(bytes: &[u8]) -> Result<LabelSequence> {
    if bytes.len() >= 4 && &bytes[..4] == LBL_MAGIC {
        decode_labels_binary(bytes)
    } else {
        let text = std::str::from_utf8(bytes)
            .map_err(|e| Error::Format(format!("label file is neither LBL1 nor UTF-8: {e}")))?;
        parse_labels_text(text)
    }
}

fn decode_labels_binary(bytes: &[u8]) -> Result<LabelSequence> {
    if bytes.len() < LBL_HEADER_LEN {
        return Err(Error::SizeMismatch {
            expected: LBL_HEADER_LEN as u64,
            actual: bytes.len() as u64,
        });
    }
    let rows = read_u32(bytes, 4) as u64;
    let alphabet = read_u32(bytes, 8);
    let expected = LBL_HEADER_LEN as u64 + rows * 4;
    if bytes.len() as u64 != expected {
        return Err(Error::SizeMismatch {
            expected,
            actual: bytes.len() as u64,
        });
    }
    let symbols = bytes[LBL_HEADER_LEN..]
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    LabelSequence::new(symbols, alphabet, DEFAULT_RATE_HZ, "")
}

fn parse_labels_text(text: &str) -> Result<LabelSequence> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    if body.is_empty() {
        return Err(Error::InvalidInput("label file holds no frames".into()));
    }
    let symbols = body
        .split('\n')
        .enumerate()
        .map(|(i, line)| {
            let token = line.strip_suffix('\r').unwrap_or(line).trim();
            token.parse::<u32>().map_err(|_| Error::Parse {
                line: i + 1,
                message: format!("expected a non-negative integer, found {token:?}"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    LabelSequence::from_symbols(symbols, DEFAULT_RATE_HZ, "")
}

/// Reads a label file, LBL1 or text (detected by magic).
pub fn read_labels(path: impl AsRef<Path>) -> Result<LabelSequence> {
    let path = path.as_ref();
    Ok(decode_labels(&read_file(path)?)?.with_tag(tag_from_path(path)))
}

pub fn encode_labels(seq: &LabelSequence) -> Result<Vec<u8>> {
    let rows =
        u32::try_from(seq.len()).map_err(|_| Error::InvalidInput("too many frames".into()))?;
    let mut out = Vec::with_capacity(LBL_HEADER_LEN + seq.len() * 4);
    out.extend_from_slice(LBL_MAGIC);
    out.extend_from_slice(&rows.to_le_bytes());
    out.extend_from_slice(&seq.alphabet_size.to_le_bytes());
    for s in &seq.symbols {
        out.extend_from_slice(&s.to_le_bytes());
    }
    Ok(out)
}

/// Writes an LBL1 file.
pub fn write_labels(seq: &LabelSequence, path: impl AsRef<Path>) -> Result<()> {
    write_bytes(path.as_ref(), &encode_labels(seq)?)
}

/// Writes one symbol per line. The alphabet size is not preserved.
pub fn write_labels_text(seq: &LabelSequence, path: impl AsRef<Path>) -> Result<()> {
    let mut text = String::with_capacity(seq.len() * 4);
    for s in &seq.symbols {
        text.push_str(&s.to_string());
        text.push('\n');
    }
    write_bytes(path.as_ref(), text.as_bytes())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StreamKind {
    Features,
    Labels,
}

/// One validated manifest entry. `path` is resolved against the manifest's
/// directory.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamSpec {
    pub name: String,
    pub path: PathBuf,
    pub kind: StreamKind,
    pub sample_rate_hz: f64,
    pub alphabet_size: Option<u32>,
    pub clusters: Option<usize>,
}

impl StreamSpec {
    /// Reads the referenced file and applies rate, tag and alphabet override.
    pub fn load(&self) -> Result<Stream> {
        let load = || -> Result<Stream> {
            Ok(match self.kind {
                StreamKind::Features => Stream::Features(
                    read_feature_matrix(&self.path)?
                        .with_sample_rate(self.sample_rate_hz)?
                        .with_tag(&self.name),
                ),
                StreamKind::Labels => {
                    let mut seq = read_labels(&self.path)?
                        .with_sample_rate(self.sample_rate_hz)?
                        .with_tag(&self.name);
                    if let Some(a) = self.alphabet_size {
                        let a = a.max(seq.alphabet_size());
                        seq = seq.with_alphabet_size(a)?;
                    }
                    Stream::Labels(seq)
                }
            })
        };
        load().map_err(|e| e.in_stream(&self.name))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub target_rate_hz: f64,
    pub streams: Vec<StreamSpec>,
}

#[derive(Deserialize)]
struct RawManifest {
    target_rate_hz: Option<f64>,
    streams: Vec<RawStream>,
}

#[derive(Deserialize)]
struct RawStream {
    name: String,
    path: String,
    kind: String,
    sample_rate_hz: Option<f64>,
    alphabet_size: Option<u32>,
    clusters: Option<usize>,
}

impl Manifest {
    /// Parses and validates manifest JSON; relative stream paths are resolved
    /// against `base_dir`.
    pub fn from_json(json: &str, base_dir: &Path) -> Result<Self> {
        let raw: RawManifest =
            serde_json::from_str(json).map_err(|e| Error::Manifest(e.to_string()))?;
        let target_rate_hz = raw
            .target_rate_hz
            .ok_or_else(|| Error::Manifest("missing field \"target_rate_hz\"".into()))?;
        check_rate(target_rate_hz).map_err(|e| Error::Manifest(e.to_string()))?;
        let mut streams = Vec::with_capacity(raw.streams.len());
        for s in raw.streams {
            let bad = |msg: String| Error::Manifest(format!("stream '{}': {msg}", s.name));
            if streams.iter().any(|p: &StreamSpec| p.name == s.name) {
                return Err(bad("duplicate stream name".into()));
            }
            let kind = match s.kind.as_str() {
                "features" => StreamKind::Features,
                "labels" => StreamKind::Labels,
                other => {
                    return Err(bad(format!(
                        "unknown kind {other:?}, expected \"features\" or \"labels\""
                    )))
                }
            };
            let sample_rate_hz = s
                .sample_rate_hz
                .ok_or_else(|| bad("missing field \"sample_rate_hz\"".into()))?;
            check_rate(sample_rate_hz).map_err(|e| bad(e.to_string()))?;
            match kind {
                StreamKind::Labels if s.clusters.is_some() => {
                    return Err(bad("label streams are never clustered".into()))
                }
                StreamKind::Features if s.alphabet_size.is_some() => {
                    return Err(bad("alphabet_size applies to label streams only".into()))
                }
                _ => {}
            }
            if s.clusters == Some(0) {
                return Err(bad("clusters must be at least 1".into()));
            }
            let path = base_dir.join(&s.path);
            if !path.is_file() {
                return Err(bad(format!("file {} does not exist", path.display())));
            }
            streams.push(StreamSpec {
                name: s.name,
                path,
                kind,
                sample_rate_hz,
                alphabet_size: s.alphabet_size,
                clusters: s.clusters,
            });
        }
        Ok(Self {
            target_rate_hz,
            streams,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let streams: Vec<_> = self
            .streams
            .iter()
            .map(|s| {
                let mut v = serde_json::json!({
                    "name": s.name,
                    "path": s.path.to_string_lossy(),
                    "kind": s.kind,
                    "sample_rate_hz": s.sample_rate_hz,
                });
                if let Some(a) = s.alphabet_size {
                    v["alphabet_size"] = a.into();
                }
                if let Some(k) = s.clusters {
                    v["clusters"] = k.into();
                }
                v
            })
            .collect();
        serde_json::json!({ "target_rate_hz": self.target_rate_hz, "streams": streams })
    }
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<Manifest> {
    let path = path.as_ref();
    let json = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    Manifest::from_json(&json, base)
}
