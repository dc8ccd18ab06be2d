//! WAV ingest/emit, manifests and provenance logs.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Cursor, Write};
use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use crate::error::{Error, Result};
use crate::pipeline::ProvenanceRecord;
use crate::waveform::Waveform;

/// Maps a sample in `[-1, 1]` to 16-bit PCM: `round(s * 32767)` with ties away
/// from zero, clamped to the `i16` range.
pub fn quantize_sample(s: f64) -> i16 {
    (s * 32767.0).round().clamp(-32768.0, 32767.0) as i16
}

pub fn dequantize_sample(v: i16) -> f64 {
    v as f64 / 32768.0
}

/// Reads a 16-bit PCM mono WAV file into `[-1, 1)` samples.
pub fn read_wav(path: &Path) -> Result<Waveform> {
    let reader = WavReader::open(path)?;
    let spec = reader.spec();
    let unsupported = |reason: String| Error::UnsupportedFormat {
        path: path.to_path_buf(),
        reason,
    };
    if spec.channels != 1 {
        return Err(unsupported(format!(
            "{} channels, only mono is supported",
            spec.channels
        )));
    }
    if spec.sample_format != SampleFormat::Int || spec.bits_per_sample != 16 {
        return Err(unsupported(format!(
            "{}-bit {:?} samples, only 16-bit PCM is supported",
            spec.bits_per_sample, spec.sample_format
        )));
    }
    let samples = reader
        .into_samples::<i16>()
        .map(|s| s.map(dequantize_sample))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Waveform::new(samples, spec.sample_rate).map_err(|e| unsupported(e.to_string()))
}

/// Reads a WAV file and checks its sample rate.
pub fn read_wav_expecting(path: &Path, sample_rate: u32) -> Result<Waveform> {
    let wf = read_wav(path)?;
    if wf.sample_rate() != sample_rate {
        return Err(Error::SampleRateMismatch {
            path: path.to_path_buf(),
            found: wf.sample_rate(),
            expected: sample_rate,
        });
    }
    Ok(wf)
}

/// Encodes a waveform as the exact bytes [`write_wav`] would produce.
pub fn encode_wav(wf: &Waveform) -> Result<Vec<u8>> {
    let spec = WavSpec {
        channels: 1,
        sample_rate: wf.sample_rate(),
        bits_per_sample: 16,
        sample_format: SampleFormat::Int,
    };
    let mut cursor = Cursor::new(Vec::with_capacity(44 + 2 * wf.len()));
    {
        let mut writer = WavWriter::new(&mut cursor, spec)?;
        let mut i16_writer = writer.get_i16_writer(wf.len() as u32);
        for &s in wf.samples() {
            i16_writer.write_sample(quantize_sample(s));
        }
        i16_writer.flush()?;
        writer.finalize()?;
    }
    Ok(cursor.into_inner())
}

pub fn write_wav(path: &Path, wf: &Waveform) -> Result<()> {
    let bytes = encode_wav(wf)?;
    std::fs::write(path, bytes)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    /// Path relative to the input directory; also the utterance key.
    pub path: String,
    /// Output file name (relative to the output directory) overriding the default.
    pub output: Option<String>,
}

/// Ordered utterance list: one relative path per line, optionally followed by a
/// tab and an output name. Blank lines and `#` comments are skipped.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut entries = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (path, output) = match line.split_once('\t') {
                Some((p, o)) => (p.trim(), Some(o.trim()).filter(|o| !o.is_empty())),
                None => (line, None),
            };
            if path.is_empty() {
                return Err(Error::InvalidManifest {
                    line: idx + 1,
                    reason: "empty path".into(),
                });
            }
            if !seen.insert(path.to_string()) {
                return Err(Error::InvalidManifest {
                    line: idx + 1,
                    reason: format!("duplicate path `{path}`"),
                });
            }
            entries.push(ManifestEntry {
                path: path.to_string(),
                output: output.map(str::to_string),
            });
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Writes one JSON object per line.
pub fn write_provenance(path: &Path, records: &[ProvenanceRecord]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_provenance(path: &Path) -> Result<Vec<ProvenanceRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut records = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line)?);
    }
    Ok(records)
}
