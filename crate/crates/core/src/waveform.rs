use crate::error::{Error, Result};

/// Mono audio signal with its sample rate.
///
/// Waveforms built with [`Waveform::new`] are checked to lie in `[-1, 1]`.
/// Intermediate results inside the augmentation chain may exceed that range
/// until normalisation, so [`Waveform::unbounded`] only checks finiteness.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl Waveform {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if let Some((i, s)) = samples
            .iter()
            .enumerate()
            .find(|(_, s)| !(-1.0..=1.0).contains(*s))
        {
            return Err(Error::InvalidWaveform(format!(
                "sample {i} = {s} lies outside [-1, 1]"
            )));
        }
        Self::unbounded(samples, sample_rate)
    }

    pub fn unbounded(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidWaveform("waveform has no samples".into()));
        }
        if sample_rate == 0 {
            return Err(Error::InvalidWaveform(
                "sample rate must be positive".into(),
            ));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::InvalidWaveform(format!("sample {i} is not finite")));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    /// Replaces the samples, keeping the sample rate. Length must not change.
    pub(crate) fn with_samples(&self, samples: Vec<f64>) -> Self {
        debug_assert_eq!(samples.len(), self.samples.len());
        Self {
            samples,
            sample_rate: self.sample_rate,
        }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false for a constructed waveform; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn energy(&self) -> f64 {
        energy(&self.samples)
    }

    pub fn peak(&self) -> f64 {
        peak(&self.samples)
    }
}

pub fn energy(samples: &[f64]) -> f64 {
    samples.iter().map(|s| s * s).sum()
}

pub fn peak(samples: &[f64]) -> f64 {
    samples.iter().fold(0.0, |m: f64, s| m.max(s.abs()))
}
