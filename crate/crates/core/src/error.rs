use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid parameter range `{field}`: {reason}")]
    InvalidRanges { field: &'static str, reason: String },
    #[error(
        "degenerate notch: stop band [{lo} Hz, {hi} Hz] has no extent inside (0, {nyquist} Hz)"
    )]
    DegenerateNotch { lo: f64, hi: f64, nyquist: f64 },
    #[error("invalid notch specification: {0}")]
    InvalidNotch(String),
    #[error("invalid filter: {0}")]
    InvalidFilter(String),
    #[error("cannot cascade an empty list of filters")]
    EmptyCascade,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("degenerate coloring filter: colored noise has zero energy")]
    DegenerateFilter,
    #[error("invalid waveform: {0}")]
    InvalidWaveform(String),
    #[error("invalid chain `{chain}`: {reason}")]
    InvalidChain { chain: String, reason: String },
    #[error("unsupported audio format in {path}: {reason}")]
    UnsupportedFormat { path: PathBuf, reason: String },
    #[error("sample rate mismatch in {path}: file has {found} Hz, expected {expected} Hz")]
    SampleRateMismatch {
        path: PathBuf,
        found: u32,
        expected: u32,
    },
    #[error("invalid manifest line {line}: {reason}")]
    InvalidManifest { line: usize, reason: String },
    #[error("invalid provenance record: {0}")]
    InvalidProvenance(String),
    #[error("config parse error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Wav(#[from] hound::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
