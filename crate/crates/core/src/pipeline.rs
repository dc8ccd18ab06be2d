//! Series and parallel composition of techniques, with provenance capture.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::{Technique, TechniqueConfig, TechniqueParams};
use crate::distortion::{apply_convolutive, apply_impulsive, apply_stationary};
use crate::error::{Error, Result};
use crate::ranges::ParameterRanges;
use crate::rng::{derive_utterance_rng, RandomSource};
use crate::sampling::{
    sample_convolutive_config, sample_impulsive_config, sample_stationary_config,
};
use crate::waveform::{peak, Waveform};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombineMode {
    /// Each technique consumes the previous technique's output.
    Series,
    /// Each technique sees the clean input; the distortions are summed.
    Parallel,
}

/// An ordered list of techniques and how to combine them.
///
/// Text form: technique digits joined by `+` (series) or `|` (parallel), e.g.
/// `1+2`, `1|2`, `3`. The identity chain is written `none` (an empty string
/// also parses to it).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ChainSpec {
    techniques: Vec<Technique>,
    mode: CombineMode,
}

impl ChainSpec {
    pub fn identity() -> Self {
        Self {
            techniques: Vec::new(),
            mode: CombineMode::Series,
        }
    }

    pub fn new(techniques: Vec<Technique>, mode: CombineMode) -> Self {
        // Series and parallel coincide for fewer than two techniques.
        let mode = if techniques.len() < 2 {
            CombineMode::Series
        } else {
            mode
        };
        Self { techniques, mode }
    }

    pub fn series(techniques: Vec<Technique>) -> Self {
        Self::new(techniques, CombineMode::Series)
    }

    pub fn parallel(techniques: Vec<Technique>) -> Self {
        Self::new(techniques, CombineMode::Parallel)
    }

    pub fn techniques(&self) -> &[Technique] {
        &self.techniques
    }

    pub fn mode(&self) -> CombineMode {
        self.mode
    }

    pub fn is_identity(&self) -> bool {
        self.techniques.is_empty()
    }
}

impl FromStr for ChainSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let text = s.trim();
        let err = |reason: &str| Error::InvalidChain {
            chain: s.to_string(),
            reason: reason.to_string(),
        };
        if text.is_empty() || text == "none" {
            return Ok(Self::identity());
        }
        let has_series = text.contains('+');
        let has_parallel = text.contains('|');
        if has_series && has_parallel {
            return Err(err("mixing '+' and '|' is not supported"));
        }
        let sep = if has_parallel { '|' } else { '+' };
        let techniques = text
            .split(sep)
            .map(|tok| {
                let tok = tok.trim();
                let mut chars = tok.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => Technique::from_digit(c).ok_or_else(|| {
                        err(&format!("unknown technique `{tok}`, expected 1, 2 or 3"))
                    }),
                    _ => Err(err(&format!(
                        "expected a single technique digit, got `{tok}`"
                    ))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let mode = if has_parallel {
            CombineMode::Parallel
        } else {
            CombineMode::Series
        };
        Ok(Self::new(techniques, mode))
    }
}

impl fmt::Display for ChainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.techniques.is_empty() {
            return f.write_str("none");
        }
        let sep = match self.mode {
            CombineMode::Series => "+",
            CombineMode::Parallel => "|",
        };
        let digits: Vec<String> = self
            .techniques
            .iter()
            .map(|t| t.digit().to_string())
            .collect();
        f.write_str(&digits.join(sep))
    }
}

impl TryFrom<String> for ChainSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ChainSpec> for String {
    fn from(c: ChainSpec) -> String {
        c.to_string()
    }
}

/// One technique application inside a provenance record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// Stream position (32-bit words) before parameter sampling.
    pub rng_start: u64,
    /// Stream position when the kernel started drawing.
    pub rng_kernel: u64,
    /// Words consumed by sampling and kernel together.
    pub rng_draws: u64,
    pub params: TechniqueParams,
}

/// Everything needed to replay the augmentation of one utterance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProvenanceRecord {
    pub key: String,
    pub master_seed: u64,
    pub chain: ChainSpec,
    pub sample_rate: u32,
    pub num_samples: usize,
    /// Output path relative to the output directory, when written by the batch front end.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    pub steps: Vec<StepRecord>,
}

/// Input and output of one technique during an execution.
#[derive(Debug, Clone)]
pub struct Stage {
    pub technique: Technique,
    pub params: TechniqueParams,
    pub input: Waveform,
    pub output: Waveform,
}

/// Full trace of a chain execution.
#[derive(Debug, Clone)]
pub struct Execution {
    pub output: Waveform,
    pub record: ProvenanceRecord,
    pub stages: Vec<Stage>,
}

/// Scales by `1 / max|y|` when the peak exceeds 1; otherwise returns `y` unchanged.
pub fn normalize(y: &[f64]) -> Vec<f64> {
    let mut out = y.to_vec();
    normalize_in_place(&mut out);
    out
}

pub fn normalize_in_place(y: &mut [f64]) {
    let p = peak(y);
    if p > 1.0 {
        for s in y.iter_mut() {
            *s /= p;
        }
    }
}

enum ParamSource<'a> {
    Sample(&'a ParameterRanges),
    Replay(&'a [StepRecord]),
}

fn run_technique(
    input: &Waveform,
    cfg: &TechniqueConfig,
    rng: &mut RandomSource,
) -> Result<Waveform> {
    Ok(match cfg {
        TechniqueConfig::Convolutive(c) => apply_convolutive(input, c),
        TechniqueConfig::Impulsive(c) => apply_impulsive(input, c, rng),
        TechniqueConfig::Stationary(c) => apply_stationary(input, c, rng)?,
    })
}

fn sample_technique(
    technique: Technique,
    ranges: &ParameterRanges,
    sample_rate: u32,
    rng: &mut RandomSource,
) -> Result<TechniqueConfig> {
    Ok(match technique {
        Technique::Convolutive => {
            TechniqueConfig::Convolutive(sample_convolutive_config(ranges, sample_rate, rng)?)
        }
        Technique::Impulsive => TechniqueConfig::Impulsive(sample_impulsive_config(ranges, rng)?),
        Technique::Stationary => {
            TechniqueConfig::Stationary(sample_stationary_config(ranges, sample_rate, rng)?)
        }
    })
}

fn execute(
    x: &Waveform,
    chain: &ChainSpec,
    rng: &mut RandomSource,
    source: ParamSource<'_>,
) -> Result<Execution> {
    let fs = x.sample_rate();
    let mut steps = Vec::with_capacity(chain.techniques.len());
    let mut stages: Vec<Stage> = Vec::with_capacity(chain.techniques.len());

    for (k, &technique) in chain.techniques.iter().enumerate() {
        let input = match (chain.mode, stages.last()) {
            (CombineMode::Series, Some(prev)) => prev.output.clone(),
            _ => x.clone(),
        };
        let rng_start = rng.word_pos();
        let cfg = match &source {
            ParamSource::Sample(ranges) => sample_technique(technique, ranges, fs, rng)?,
            ParamSource::Replay(records) => {
                let step = &records[k];
                if step.params.technique() != technique {
                    return Err(Error::InvalidProvenance(format!(
                        "step {k} is {} but the chain expects {technique}",
                        step.params.technique()
                    )));
                }
                rng.seek(step.rng_kernel);
                TechniqueConfig::from_params(&step.params, fs as f64)?
            }
        };
        let rng_kernel = rng.word_pos();
        let output = run_technique(&input, &cfg, rng)?;
        let step = match &source {
            ParamSource::Sample(_) => StepRecord {
                rng_start,
                rng_kernel,
                rng_draws: rng.word_pos() - rng_start,
                params: cfg.params(),
            },
            ParamSource::Replay(records) => {
                let step = records[k].clone();
                if rng.word_pos() != step.rng_start + step.rng_draws {
                    return Err(Error::InvalidProvenance(format!(
                        "step {k} consumed a different number of random words than recorded"
                    )));
                }
                step
            }
        };
        stages.push(Stage {
            technique,
            params: step.params.clone(),
            input,
            output,
        });
        steps.push(step);
    }

    let mut combined = match (chain.mode, stages.split_first()) {
        (_, None) => x.samples().to_vec(),
        (CombineMode::Series, Some(_)) => stages.last().unwrap().output.samples().to_vec(),
        (CombineMode::Parallel, Some((first, rest))) => {
            // y_1 + sum_{k>=2} (y_k - x): equal to x + sum_k (y_k - x), and exact
            // for a single technique.
            let mut acc = first.output.samples().to_vec();
            for stage in rest {
                for ((a, y), c) in acc.iter_mut().zip(stage.output.samples()).zip(x.samples()) {
                    *a += y - c;
                }
            }
            acc
        }
    };
    normalize_in_place(&mut combined);

    let record = ProvenanceRecord {
        key: String::from_utf8_lossy(rng.key()).into_owned(),
        master_seed: rng.master_seed(),
        chain: chain.clone(),
        sample_rate: fs,
        num_samples: x.len(),
        output: None,
        steps,
    };
    Ok(Execution {
        output: x.with_samples(combined),
        record,
        stages,
    })
}

/// Runs the chain in whatever mode it declares.
pub fn run_chain(
    x: &Waveform,
    chain: &ChainSpec,
    ranges: &ParameterRanges,
    rng: &mut RandomSource,
) -> Result<(Waveform, ProvenanceRecord)> {
    let exec = execute(x, chain, rng, ParamSource::Sample(ranges))?;
    Ok((exec.output, exec.record))
}

/// Like [`run_chain`], but keeps each technique's input and output.
pub fn run_chain_traced(
    x: &Waveform,
    chain: &ChainSpec,
    ranges: &ParameterRanges,
    rng: &mut RandomSource,
) -> Result<Execution> {
    execute(x, chain, rng, ParamSource::Sample(ranges))
}

fn require_mode(chain: &ChainSpec, mode: CombineMode) -> Result<()> {
    if chain.mode != mode {
        return Err(Error::InvalidChain {
            chain: chain.to_string(),
            reason: format!("expected a {mode:?} chain"),
        });
    }
    Ok(())
}

pub fn run_series(
    x: &Waveform,
    chain: &ChainSpec,
    ranges: &ParameterRanges,
    rng: &mut RandomSource,
) -> Result<(Waveform, ProvenanceRecord)> {
    require_mode(chain, CombineMode::Series)?;
    run_chain(x, chain, ranges, rng)
}

/// Parallel composition. Single-technique chains are accepted and behave
/// exactly like their series counterpart.
pub fn run_parallel(
    x: &Waveform,
    chain: &ChainSpec,
    ranges: &ParameterRanges,
    rng: &mut RandomSource,
) -> Result<(Waveform, ProvenanceRecord)> {
    if chain.techniques.len() > 1 {
        require_mode(chain, CombineMode::Parallel)?;
    }
    run_chain(x, chain, ranges, rng)
}

/// Re-executes a recorded augmentation from its stored parameters.
pub fn replay_traced(x: &Waveform, record: &ProvenanceRecord) -> Result<Execution> {
    if record.sample_rate != x.sample_rate() {
        return Err(Error::InvalidProvenance(format!(
            "record is for {} Hz audio, input is {} Hz",
            record.sample_rate,
            x.sample_rate()
        )));
    }
    if record.num_samples != x.len() {
        return Err(Error::InvalidProvenance(format!(
            "record is for {} samples, input has {}",
            record.num_samples,
            x.len()
        )));
    }
    if record.steps.len() != record.chain.techniques.len() {
        return Err(Error::InvalidProvenance(format!(
            "chain `{}` has {} techniques but the record has {} steps",
            record.chain,
            record.chain.techniques.len(),
            record.steps.len()
        )));
    }
    let mut rng = derive_utterance_rng(record.master_seed, record.key.as_bytes());
    let mut exec = execute(
        x,
        &record.chain,
        &mut rng,
        ParamSource::Replay(&record.steps),
    )?;
    exec.record.output = record.output.clone();
    Ok(exec)
}

pub fn replay(x: &Waveform, record: &ProvenanceRecord) -> Result<Waveform> {
    Ok(replay_traced(x, record)?.output)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(s: &str) -> ChainSpec {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display() {
        for s in ["1", "2", "3", "1+2", "1|2", "1+2+3", "2|3|1", "none"] {
            assert_eq!(chain(s).to_string(), s);
        }
        assert!(chain("").is_identity());
        assert_eq!(chain("1+2").mode(), CombineMode::Series);
        assert_eq!(chain("1|2").mode(), CombineMode::Parallel);
        assert_eq!(
            chain(" 1 + 3 ").techniques(),
            &[Technique::Convolutive, Technique::Stationary]
        );
    }

    #[test]
    fn parse_errors() {
        for s in ["4", "1+", "12", "(1|2)+3", "1+2|3", "a", "1++2"] {
            assert!(s.parse::<ChainSpec>().is_err(), "{s}");
        }
    }

    #[test]
    fn normalize_examples() {
        let y = vec![0.8, -0.2, 0.1];
        assert_eq!(normalize(&y), y);
        let y = vec![2.0, -1.0, 0.5];
        let n = normalize(&y);
        assert_eq!(n, vec![1.0, -0.5, 0.25]);
        assert_eq!(normalize(&n), n);
        let n = normalize(&[-3.0, 1.5]);
        assert_eq!(n, vec![-1.0, 0.5]);
    }

    #[test]
    fn mode_preconditions() {
        let x = Waveform::new(vec![0.5, -0.5, 0.25], 16_000).unwrap();
        let ranges = ParameterRanges::default();
        let mut rng = derive_utterance_rng(0, b"k");
        assert!(run_series(&x, &chain("1|2"), &ranges, &mut rng).is_err());
        assert!(run_parallel(&x, &chain("1+2"), &ranges, &mut rng).is_err());
        assert!(run_parallel(&x, &chain("2"), &ranges, &mut rng).is_ok());
    }

    #[test]
    fn chain_serializes_as_string() {
        let json = serde_json::to_string(&chain("1|3")).unwrap();
        assert_eq!(json, r#""1|3""#);
        let back: ChainSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, chain("1|3"));
    }
}
