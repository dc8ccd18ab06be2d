//! Deterministic raw-waveform data boosting.
//!
//! Three distortion techniques are provided: convolutive noise built from
//! multi-band notch filters applied to successive powers of the signal,
//! impulsive signal-dependent noise, and stationary coloured noise mixed at a
//! target SNR. Techniques compose in series or in parallel, and every random
//! parameter is captured in a [`ProvenanceRecord`] so any output can be
//! replayed bit-exactly.

pub mod audio_io;
pub mod batch;
pub mod config;
pub mod distortion;
pub mod error;
pub mod filter;
pub mod pipeline;
pub mod ranges;
pub mod rng;
pub mod sampling;
pub mod waveform;

pub use config::{
    db_to_linear, ConvolutiveConfig, ImpulsiveConfig, StationaryConfig, Technique, TechniqueConfig,
    TechniqueParams,
};
pub use error::{Error, Result};
pub use filter::{FirFilter, NotchSpec};
pub use pipeline::{ChainSpec, CombineMode, ProvenanceRecord};
pub use ranges::{ParameterRanges, DEFAULT_SAMPLE_RATE};
pub use rng::{derive_utterance_rng, RandomSource};
pub use waveform::Waveform;

/// Crate version, for tools that embed the library.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
