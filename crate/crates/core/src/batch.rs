//! Corpus-level augmentation, verification and filter-design commands.

use std::fmt;
use std::path::{Path, PathBuf};

use log::{error, info};
use rayon::prelude::*;

use crate::audio_io::{
    encode_wav, read_provenance, read_wav_expecting, write_provenance, Manifest,
};
use crate::config::{ConvolutiveConfig, TechniqueParams};
use crate::distortion::measured_snr_db;
use crate::error::{Error, Result};
use crate::filter::{
    design_multiband_fir, frequency_response, notch_depths, write_response_csv, NotchSpec,
};
use crate::pipeline::{replay_traced, run_chain, ChainSpec, ProvenanceRecord, Stage};
use crate::ranges::ParameterRanges;
use crate::rng::derive_utterance_rng;

/// Maximum deviation between drawn and measured SNR accepted by `verify`.
pub const SNR_TOLERANCE_DB: f64 = 0.01;
/// Minimum attenuation of a resolvable notch below the mean pass band.
pub const MIN_NOTCH_DEPTH_DB: f64 = 6.0;

#[derive(Debug, Clone)]
pub struct AugmentOptions {
    pub manifest: PathBuf,
    pub input_dir: PathBuf,
    pub output_dir: PathBuf,
    pub chain: ChainSpec,
    pub seed: u64,
    pub ranges: ParameterRanges,
    pub sample_rate: u32,
    pub workers: usize,
    /// Defaults to `<output_dir>/provenance_<chain>.jsonl`.
    pub provenance: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub path: String,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct AugmentReport {
    pub records: Vec<ProvenanceRecord>,
    pub failures: Vec<Failure>,
    pub provenance_path: PathBuf,
}

impl AugmentReport {
    pub fn success(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `dir/name.wav` becomes `dir/name_<chain>.wav`.
pub fn default_output_name(relative: &str, chain: &ChainSpec) -> String {
    let path = Path::new(relative);
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_{chain}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{chain}"),
    };
    match path.parent().filter(|p| !p.as_os_str().is_empty()) {
        Some(parent) => parent.join(name).to_string_lossy().into_owned(),
        None => name,
    }
}

pub fn default_provenance_path(output_dir: &Path, chain: &ChainSpec) -> PathBuf {
    output_dir.join(format!("provenance_{chain}.jsonl"))
}

fn augment_one(
    opts: &AugmentOptions,
    rel: &str,
    output_override: Option<&str>,
) -> Result<ProvenanceRecord> {
    let input = read_wav_expecting(&opts.input_dir.join(rel), opts.sample_rate)?;
    let mut rng = derive_utterance_rng(opts.seed, rel.as_bytes());
    let (output, mut record) = run_chain(&input, &opts.chain, &opts.ranges, &mut rng)?;
    let out_rel = output_override
        .map(str::to_string)
        .unwrap_or_else(|| default_output_name(rel, &opts.chain));
    let out_path = opts.output_dir.join(&out_rel);
    if let Some(parent) = out_path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(&out_path, encode_wav(&output)?)?;
    record.output = Some(out_rel);
    Ok(record)
}

/// Augments every manifest entry. Per-utterance failures are collected rather
/// than aborting the batch; configuration problems fail before any work.
pub fn augment(opts: &AugmentOptions) -> Result<AugmentReport> {
    opts.ranges.validate_for(opts.sample_rate)?;
    let manifest = Manifest::load(&opts.manifest)?;
    std::fs::create_dir_all(&opts.output_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;

    let results: Vec<(String, Result<ProvenanceRecord>)> = pool.install(|| {
        manifest
            .entries
            .par_iter()
            .map(|e| {
                (
                    e.path.clone(),
                    augment_one(opts, &e.path, e.output.as_deref()),
                )
            })
            .collect()
    });

    let mut records = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (path, res) in results {
        match res {
            Ok(r) => records.push(r),
            Err(e) => {
                error!("{path}: {e}");
                failures.push(Failure {
                    path,
                    reason: e.to_string(),
                });
            }
        }
    }
    let provenance_path = opts
        .provenance
        .clone()
        .unwrap_or_else(|| default_provenance_path(&opts.output_dir, &opts.chain));
    write_provenance(&provenance_path, &records)?;
    info!(
        "augmented {} of {} utterances with chain {}",
        records.len(),
        manifest.len(),
        opts.chain
    );
    Ok(AugmentReport {
        records,
        failures,
        provenance_path,
    })
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub provenance: PathBuf,
    pub input_dir: PathBuf,
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "ok" } else { "FAIL" };
        write!(f, "{status} {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone)]
pub struct UtteranceVerification {
    pub key: String,
    pub checks: Vec<Check>,
}

impl UtteranceVerification {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub utterances: Vec<UtteranceVerification>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.utterances.iter().all(UtteranceVerification::passed)
    }

    pub fn failed_keys(&self) -> Vec<&str> {
        self.utterances
            .iter()
            .filter(|u| !u.passed())
            .map(|u| u.key.as_str())
            .collect()
    }
}

fn stage_checks(k: usize, stage: &Stage, fs: f64) -> Result<Vec<Check>> {
    let input = stage.input.samples();
    let output = stage.output.samples();
    let mut checks = Vec::new();
    match &stage.params {
        TechniqueParams::Stationary(p) => {
            let snr = measured_snr_db(input, output);
            checks.push(Check {
                name: format!("step {k} snr"),
                passed: (snr - p.snr_db).abs() <= SNR_TOLERANCE_DB,
                detail: format!("measured {snr:.4} dB, drawn {:.4} dB", p.snr_db),
            });
        }
        TechniqueParams::Impulsive(c) => {
            let expected = c.impulse_count(input.len());
            let modified: Vec<usize> = (0..input.len())
                .filter(|&n| input[n] != output[n])
                .collect();
            let bounded = modified
                .iter()
                .all(|&n| output[n].abs() <= (1.0 + c.g_sd) * input[n].abs());
            checks.push(Check {
                name: format!("step {k} impulses"),
                passed: modified.len() <= expected && bounded,
                detail: format!(
                    "{} samples modified, {expected} positions drawn, amplitude bound {}",
                    modified.len(),
                    if bounded { "held" } else { "violated" }
                ),
            });
        }
        TechniqueParams::Convolutive { orders } => {
            let cfg = ConvolutiveConfig::from_params(orders, fs)?;
            let (mut checked, mut shallow) = (0, 0);
            for order in cfg.orders() {
                for d in notch_depths(&order.filter, &order.notches, fs)? {
                    if let (true, Some(depth)) = (d.resolvable, d.depth_db) {
                        checked += 1;
                        if depth < MIN_NOTCH_DEPTH_DB {
                            shallow += 1;
                        }
                    }
                }
            }
            checks.push(Check {
                name: format!("step {k} notches"),
                passed: shallow == 0,
                detail: format!(
                    "{checked} resolvable notches checked, {shallow} shallower than {MIN_NOTCH_DEPTH_DB} dB"
                ),
            });
        }
    }
    Ok(checks)
}

fn verify_one(opts: &VerifyOptions, record: &ProvenanceRecord) -> Result<Vec<Check>> {
    let input = read_wav_expecting(&opts.input_dir.join(&record.key), record.sample_rate)?;
    let exec = replay_traced(&input, record)?;
    let out_rel = record
        .output
        .clone()
        .unwrap_or_else(|| default_output_name(&record.key, &record.chain));
    let expected = encode_wav(&exec.output)?;
    let actual = std::fs::read(opts.output_dir.join(&out_rel))?;
    let mut checks = vec![Check {
        name: "replay".into(),
        passed: expected == actual,
        detail: if expected == actual {
            format!("{out_rel} reproduced bit-exactly")
        } else {
            format!("replay-mismatch: {out_rel} differs from the replayed augmentation")
        },
    }];
    let fs = record.sample_rate as f64;
    for (k, stage) in exec.stages.iter().enumerate() {
        checks.extend(stage_checks(k, stage, fs)?);
    }
    Ok(checks)
}

/// Replays every provenance record against the clean corpus and checks the
/// stored outputs and technique-level properties.
pub fn verify(opts: &VerifyOptions) -> Result<VerifyReport> {
    let records = read_provenance(&opts.provenance)?;
    let utterances = records
        .par_iter()
        .map(|record| {
            let checks = verify_one(opts, record).unwrap_or_else(|e| {
                vec![Check {
                    name: "replay".into(),
                    passed: false,
                    detail: e.to_string(),
                }]
            });
            UtteranceVerification {
                key: record.key.clone(),
                checks,
            }
        })
        .collect();
    Ok(VerifyReport { utterances })
}

/// Parses `f_c:delta_f:taps`. Frequencies at or below 0.5 (both of them) are
/// taken as normalised to the sample rate, anything else as Hz.
pub fn parse_notch_arg(arg: &str, fs: f64) -> Result<NotchSpec> {
    let bad = |reason: &str| Error::InvalidNotch(format!("`{arg}`: {reason}"));
    let parts: Vec<&str> = arg.split(':').collect();
    let [f_c, delta_f, taps] = parts[..] else {
        return Err(bad("expected f_c:delta_f:taps"));
    };
    let f_c: f64 = f_c
        .trim()
        .parse()
        .map_err(|_| bad("invalid centre frequency"))?;
    let delta_f: f64 = delta_f.trim().parse().map_err(|_| bad("invalid width"))?;
    let taps: usize = taps.trim().parse().map_err(|_| bad("invalid tap count"))?;
    let spec = if f_c <= 0.5 && delta_f <= 0.5 {
        NotchSpec::normalized(f_c, delta_f, taps, fs)
    } else {
        NotchSpec::new(f_c, delta_f, taps)
    };
    spec.stop_band(fs)?;
    Ok(spec)
}

/// Designs the multi-band filter for `notches` and writes its response as CSV.
pub fn design_filter_csv(notches: &[NotchSpec], fs: f64, points: usize, out: &Path) -> Result<()> {
    let filter = design_multiband_fir(notches, fs)?;
    let response = frequency_response(&filter, points, fs);
    let file = std::fs::File::create(out)?;
    write_response_csv(std::io::BufWriter::new(file), &response)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn output_names() {
        let c: ChainSpec = "1+2".parse().unwrap();
        assert_eq!(default_output_name("a.wav", &c), "a_1+2.wav");
        assert_eq!(default_output_name("spk/a.b.wav", &c), "spk/a.b_1+2.wav");
        assert_eq!(default_output_name("raw", &c), "raw_1+2");
    }

    #[test]
    fn notch_args() {
        let n = parse_notch_arg("0.35:0.03:94", 16_000.0).unwrap();
        assert_eq!(n, NotchSpec::new(5600.0, 480.0, 94));
        let n = parse_notch_arg("1000:200:31", 16_000.0).unwrap();
        assert_eq!(n, NotchSpec::new(1000.0, 200.0, 31));
        assert!(parse_notch_arg("1000:200", 16_000.0).is_err());
        assert!(parse_notch_arg("x:200:31", 16_000.0).is_err());
        assert!(parse_notch_arg("9000:100:31", 16_000.0).is_err());
    }
}
