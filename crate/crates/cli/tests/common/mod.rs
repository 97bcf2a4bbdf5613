#![allow(dead_code)]

use std::path::{Path, PathBuf};

use modmi::ingestion::{write_feature_matrix, write_labels, FeatureMatrix, LabelSequence};
use modmi::synthetic::{exhaustive_stream, gen_gaussian_mixture, JointPmf};
use modmi_cli::Outcome;

pub fn modmi(args: &[&str]) -> Outcome {
    modmi_threads(args, None)
}

pub fn modmi_threads(args: &[&str], threads: Option<usize>) -> Outcome {
    let mut full = vec!["modmi"];
    full.extend_from_slice(args);
    modmi_cli::run(full, threads)
}

pub fn ok(args: &[&str]) -> String {
    let out = modmi(args);
    assert_eq!(out.code, 0, "modmi {args:?} failed: {}", out.stderr);
    out.stdout
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Writes the streams and a 25 Hz manifest into `dir`.
pub fn write_manifest(dir: &Path, features: &[(&str, &FeatureMatrix)], labels: &[(&str, &LabelSequence)]) -> PathBuf {
    let mut streams = Vec::new();
    for (name, m) in features {
        let file = format!("{name}.fmx");
        write_feature_matrix(m, dir.join(&file)).unwrap();
        streams.push(serde_json::json!({
            "name": name, "path": file, "kind": "features",
            "sample_rate_hz": m.sample_rate_hz(),
        }));
    }
    for (name, l) in labels {
        let file = format!("{name}.lbl");
        write_labels(l, dir.join(&file)).unwrap();
        streams.push(serde_json::json!({
            "name": name, "path": file, "kind": "labels",
            "sample_rate_hz": l.sample_rate_hz(),
        }));
    }
    let path = dir.join("manifest.json");
    let json = serde_json::json!({ "target_rate_hz": 25.0, "streams": streams });
    std::fs::write(&path, serde_json::to_string_pretty(&json).unwrap()).unwrap();
    path
}

pub fn xor_manifest(dir: &Path) -> PathBuf {
    let s = exhaustive_stream(&JointPmf::xor(), 1).unwrap();
    write_manifest(dir, &[], &[("V", &s[0]), ("T", &s[1]), ("S", &s[2])])
}

/// Video and audio features plus text labels from one 6-component mixture.
pub fn av_manifest(dir: &Path) -> PathBuf {
    let audio_centers: Vec<Vec<f64>> = (0..6).map(|c| vec![c as f64 * 2.0, (c % 3) as f64, 0.5]).collect();
    let video_centers: Vec<Vec<f64>> = (0..6).map(|c| vec![(c % 2) as f64 * 3.0, (c / 2) as f64 * 3.0]).collect();
    let (audio, text) = gen_gaussian_mixture(&audio_centers, 1.0, 150, 11).unwrap();
    let (video, _) = gen_gaussian_mixture(&video_centers, 1.0, 150, 12).unwrap();
    write_manifest(dir, &[("audio", &audio), ("video", &video)], &[("text", &text)])
}
