#![allow(dead_code)]

use std::path::{Path, PathBuf};

use modmi::ingestion::{write_feature_matrix, write_labels, FeatureMatrix, LabelSequence};

/// Writes each stream next to a manifest and returns the manifest path.
/// Entries are `(name, stream, extra JSON fields)`.
pub enum Entry<'a> {
    Features(&'a str, &'a FeatureMatrix, Option<usize>),
    Labels(&'a str, &'a LabelSequence),
}

pub fn write_manifest(dir: &Path, target_rate_hz: f64, entries: &[Entry]) -> PathBuf {
    let mut streams = Vec::new();
    for e in entries {
        match e {
            Entry::Features(name, m, k) => {
                let file = format!("{name}.fmx");
                write_feature_matrix(m, dir.join(&file)).unwrap();
                let mut v = serde_json::json!({
                    "name": name, "path": file, "kind": "features",
                    "sample_rate_hz": m.sample_rate_hz(),
                });
                if let Some(k) = k {
                    v["clusters"] = (*k).into();
                }
                streams.push(v);
            }
            Entry::Labels(name, l) => {
                let file = format!("{name}.lbl");
                write_labels(l, dir.join(&file)).unwrap();
                streams.push(serde_json::json!({
                    "name": name, "path": file, "kind": "labels",
                    "sample_rate_hz": l.sample_rate_hz(),
                }));
            }
        }
    }
    let path = dir.join("manifest.json");
    let json = serde_json::json!({ "target_rate_hz": target_rate_hz, "streams": streams });
    std::fs::write(&path, serde_json::to_string_pretty(&json).unwrap()).unwrap();
    path
}
