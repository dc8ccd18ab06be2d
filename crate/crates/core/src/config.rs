//! Concrete parameters for one application of each distortion technique.
//!
//! `*Params` types hold exactly what was sampled and are what provenance
//! records store. `*Config` types add the designed filters and are what the
//! kernels consume.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::{design_multiband_fir, FirFilter, NotchSpec};

/// Amplitude gain for a level in dB: `10^(g_db / 20)`.
pub fn db_to_linear(g_db: f64) -> f64 {
    10f64.powf(g_db / 20.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Technique {
    /// Linear and non-linear convolutive noise (multi-band filters on signal powers).
    Convolutive,
    /// Impulsive signal-dependent additive noise.
    Impulsive,
    /// Stationary signal-independent coloured additive noise.
    Stationary,
}

impl Technique {
    pub fn digit(self) -> char {
        match self {
            Technique::Convolutive => '1',
            Technique::Impulsive => '2',
            Technique::Stationary => '3',
        }
    }

    pub fn from_digit(c: char) -> Option<Self> {
        match c {
            '1' => Some(Technique::Convolutive),
            '2' => Some(Technique::Impulsive),
            '3' => Some(Technique::Stationary),
            _ => None,
        }
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Technique::Convolutive => "convolutive",
            Technique::Impulsive => "impulsive",
            Technique::Stationary => "stationary",
        };
        f.write_str(name)
    }
}

/// Sampled parameters of one harmonic order `j` of the convolutive technique.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderParams {
    pub notches: Vec<NotchSpec>,
    pub gain_db: f64,
}

/// One order of the convolutive technique, with its designed filter.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicOrder {
    pub notches: Vec<NotchSpec>,
    pub gain_db: f64,
    pub filter: FirFilter,
}

impl HarmonicOrder {
    pub fn gain(&self) -> f64 {
        db_to_linear(self.gain_db)
    }
}

/// Filters and gains for orders `1..=N_f`; index 0 is the linear term.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutiveConfig {
    orders: Vec<HarmonicOrder>,
}

impl ConvolutiveConfig {
    pub fn from_params(orders: &[OrderParams], fs: f64) -> Result<Self> {
        let orders = orders
            .iter()
            .map(|o| {
                Ok(HarmonicOrder {
                    filter: design_multiband_fir(&o.notches, fs)?,
                    notches: o.notches.clone(),
                    gain_db: o.gain_db,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_orders(orders)
    }

    /// Builds a config from explicit filters and gains in dB. The result has no
    /// notch description, so its parameters do not replay the filters.
    pub fn from_filters(filters: Vec<(FirFilter, f64)>) -> Result<Self> {
        Self::from_orders(
            filters
                .into_iter()
                .map(|(filter, gain_db)| HarmonicOrder {
                    notches: Vec::new(),
                    gain_db,
                    filter,
                })
                .collect(),
        )
    }

    fn from_orders(orders: Vec<HarmonicOrder>) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::InvalidRanges {
                field: "n_f",
                reason: "convolutive config needs at least one order".into(),
            });
        }
        Ok(Self { orders })
    }

    pub fn orders(&self) -> &[HarmonicOrder] {
        &self.orders
    }

    pub fn params(&self) -> Vec<OrderParams> {
        self.orders
            .iter()
            .map(|o| OrderParams {
                notches: o.notches.clone(),
                gain_db: o.gain_db,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpulsiveConfig {
    /// Fraction of samples (not percent) that receive an impulse.
    pub p_rel: f64,
    pub g_sd: f64,
}

impl ImpulsiveConfig {
    pub fn new(p_rel: f64, g_sd: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_rel) {
            return Err(Error::InvalidRanges {
                field: "p_rel_range",
                reason: format!("fraction {p_rel} outside [0, 1]"),
            });
        }
        if !(g_sd.is_finite() && g_sd > 0.0) {
            return Err(Error::InvalidRanges {
                field: "g_sd",
                reason: format!("gain {g_sd} must be positive"),
            });
        }
        Ok(Self { p_rel, g_sd })
    }

    /// Number of impulse positions `P = round(p_rel * len)`.
    pub fn impulse_count(&self, len: usize) -> usize {
        ((self.p_rel * len as f64).round() as usize).min(len)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryParams {
    pub snr_db: f64,
    pub notches: Vec<NotchSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryConfig {
    pub snr_db: f64,
    pub notches: Vec<NotchSpec>,
    pub coloring_filter: FirFilter,
}

impl StationaryConfig {
    pub fn from_params(params: &StationaryParams, fs: f64) -> Result<Self> {
        if !params.snr_db.is_finite() {
            return Err(Error::InvalidRanges {
                field: "snr_range",
                reason: "SNR must be finite".into(),
            });
        }
        Ok(Self {
            snr_db: params.snr_db,
            notches: params.notches.clone(),
            coloring_filter: design_multiband_fir(&params.notches, fs)?,
        })
    }

    pub fn with_filter(snr_db: f64, coloring_filter: FirFilter) -> Self {
        Self {
            snr_db,
            notches: Vec::new(),
            coloring_filter,
        }
    }

    pub fn params(&self) -> StationaryParams {
        StationaryParams {
            snr_db: self.snr_db,
            notches: self.notches.clone(),
        }
    }
}

/// Serialisable parameters of any technique.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "technique", rename_all = "snake_case")]
pub enum TechniqueParams {
    Convolutive { orders: Vec<OrderParams> },
    Impulsive(ImpulsiveConfig),
    Stationary(StationaryParams),
}

impl TechniqueParams {
    pub fn technique(&self) -> Technique {
        match self {
            TechniqueParams::Convolutive { .. } => Technique::Convolutive,
            TechniqueParams::Impulsive(_) => Technique::Impulsive,
            TechniqueParams::Stationary(_) => Technique::Stationary,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TechniqueConfig {
    Convolutive(ConvolutiveConfig),
    Impulsive(ImpulsiveConfig),
    Stationary(StationaryConfig),
}

impl TechniqueConfig {
    pub fn from_params(params: &TechniqueParams, fs: f64) -> Result<Self> {
        Ok(match params {
            TechniqueParams::Convolutive { orders } => {
                TechniqueConfig::Convolutive(ConvolutiveConfig::from_params(orders, fs)?)
            }
            TechniqueParams::Impulsive(c) => {
                TechniqueConfig::Impulsive(ImpulsiveConfig::new(c.p_rel, c.g_sd)?)
            }
            TechniqueParams::Stationary(p) => {
                TechniqueConfig::Stationary(StationaryConfig::from_params(p, fs)?)
            }
        })
    }

    pub fn params(&self) -> TechniqueParams {
        match self {
            TechniqueConfig::Convolutive(c) => TechniqueParams::Convolutive { orders: c.params() },
            TechniqueConfig::Impulsive(c) => TechniqueParams::Impulsive(*c),
            TechniqueConfig::Stationary(c) => TechniqueParams::Stationary(c.params()),
        }
    }

    pub fn technique(&self) -> Technique {
        match self {
            TechniqueConfig::Convolutive(_) => Technique::Convolutive,
            TechniqueConfig::Impulsive(_) => Technique::Impulsive,
            TechniqueConfig::Stationary(_) => Technique::Stationary,
        }
    }
}
