//! Sampling ranges for the three distortion techniques.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_SAMPLE_RATE: u32 = 16_000;

/// Ranges from which every random augmentation parameter is drawn uniformly.
///
/// Two-element arrays are closed intervals `[min, max]`. Frequencies are in
/// Hz, gains in dB, `p_rel_range` in percent of the utterance length.
/// The defaults reproduce the reference configuration; any subset of keys may
/// be overridden from a TOML or JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParameterRanges {
    pub n_notch: usize,
    pub n_fir_range: [usize; 2],
    pub n_f: usize,
    pub f_c_range: [f64; 2],
    pub delta_f_range: [f64; 2],
    pub g_cn_1_range: [f64; 2],
    pub g_cn_higher_range: [f64; 2],
    pub p_rel_range: [f64; 2],
    pub g_sd: f64,
    pub snr_range: [f64; 2],
}

impl Default for ParameterRanges {
    fn default() -> Self {
        Self {
            n_notch: 5,
            n_fir_range: [10, 100],
            n_f: 5,
            f_c_range: [20.0, 8000.0],
            delta_f_range: [100.0, 1000.0],
            g_cn_1_range: [0.0, 0.0],
            g_cn_higher_range: [-20.0, -5.0],
            p_rel_range: [0.0, 10.0],
            g_sd: 2.0,
            snr_range: [10.0, 40.0],
        }
    }
}

fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidRanges {
        field,
        reason: reason.into(),
    }
}

fn check_interval(field: &'static str, r: [f64; 2]) -> Result<()> {
    if !r[0].is_finite() || !r[1].is_finite() {
        return Err(invalid(field, "bounds must be finite"));
    }
    if r[0] > r[1] {
        return Err(invalid(field, format!("min {} exceeds max {}", r[0], r[1])));
    }
    Ok(())
}

impl ParameterRanges {
    /// Checks the sample-rate independent constraints.
    pub fn validate(&self) -> Result<()> {
        if self.n_fir_range[0] > self.n_fir_range[1] {
            return Err(invalid(
                "n_fir_range",
                format!(
                    "min {} exceeds max {}",
                    self.n_fir_range[0], self.n_fir_range[1]
                ),
            ));
        }
        if self.n_fir_range[0] < 2 {
            return Err(invalid(
                "n_fir_range",
                "filters need at least 3 taps (n_fir >= 2)",
            ));
        }
        if self.n_f < 1 {
            return Err(invalid("n_f", "at least one harmonic order is required"));
        }
        check_interval("f_c_range", self.f_c_range)?;
        if self.f_c_range[0] < 0.0 {
            return Err(invalid(
                "f_c_range",
                "center frequencies must be non-negative",
            ));
        }
        check_interval("delta_f_range", self.delta_f_range)?;
        if self.delta_f_range[0] <= 0.0 {
            return Err(invalid("delta_f_range", "notch widths must be positive"));
        }
        check_interval("g_cn_1_range", self.g_cn_1_range)?;
        check_interval("g_cn_higher_range", self.g_cn_higher_range)?;
        check_interval("p_rel_range", self.p_rel_range)?;
        if self.p_rel_range[0] < 0.0 || self.p_rel_range[1] > 100.0 {
            return Err(invalid("p_rel_range", "percentages must lie in [0, 100]"));
        }
        if !(self.g_sd.is_finite() && self.g_sd > 0.0) {
            return Err(invalid("g_sd", "gain must be positive and finite"));
        }
        check_interval("snr_range", self.snr_range)?;
        Ok(())
    }

    /// Full validation, including frequency ranges against the Nyquist rate.
    pub fn validate_for(&self, sample_rate: u32) -> Result<()> {
        self.validate()?;
        if sample_rate == 0 {
            return Err(invalid("sample_rate", "must be positive"));
        }
        let nyquist = sample_rate as f64 / 2.0;
        if self.f_c_range[1] > nyquist {
            return Err(invalid(
                "f_c_range",
                format!(
                    "max {} Hz exceeds Nyquist ({nyquist} Hz at {sample_rate} Hz)",
                    self.f_c_range[1]
                ),
            ));
        }
        Ok(())
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let ranges: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        ranges.validate()?;
        Ok(ranges)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let ranges: Self = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        ranges.validate()?;
        Ok(ranges)
    }

    /// Loads a config file. `.json` files are parsed as JSON, anything else as TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json_str(&text),
            _ => Self::from_toml_str(&text),
        }
    }
}
