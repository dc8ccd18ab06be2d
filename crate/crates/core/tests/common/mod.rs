#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::Path;

use rawboost::audio_io::write_wav;
use rawboost::{derive_utterance_rng, Waveform};

/// Writes `count` synthetic mono utterances under `dir` plus a manifest listing them.
pub fn write_corpus(dir: &Path, count: usize, seconds: f64, fs: u32) -> std::path::PathBuf {
    std::fs::create_dir_all(dir.join("spk")).unwrap();
    let len = (seconds * fs as f64) as usize;
    let mut manifest = String::new();
    for i in 0..count {
        let rel = format!("spk/utt{i:03}.wav");
        let mut rng = derive_utterance_rng(i as u64, b"corpus");
        let f0 = 100.0 + 10.0 * i as f64;
        let samples = (0..len)
            .map(|n| {
                let t = n as f64 / fs as f64;
                let voiced = (2.0 * std::f64::consts::PI * f0 * t).sin()
                    + 0.5 * (2.0 * std::f64::consts::PI * 2.0 * f0 * t).sin();
                0.3 * voiced + 0.05 * rng.uniform(-1.0, 1.0)
            })
            .collect();
        write_wav(&dir.join(&rel), &Waveform::new(samples, fs).unwrap()).unwrap();
        manifest.push_str(&rel);
        manifest.push('\n');
    }
    let path = dir.join("manifest.txt");
    std::fs::write(&path, manifest).unwrap();
    path
}

/// Relative path to file contents for every file under `root`.
pub fn snapshot(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path
                    .strip_prefix(root)
                    .unwrap()
                    .to_string_lossy()
                    .into_owned();
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    out
}
