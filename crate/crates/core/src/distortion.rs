//! The three distortion kernels.
//!
//! All randomness of the convolutive technique lives in its config. The
//! impulsive and stationary kernels draw positions, impulse values and white
//! noise from the [`RandomSource`] they are handed.

use crate::config::{ConvolutiveConfig, ImpulsiveConfig, StationaryConfig};
use crate::error::{Error, Result};
use crate::filter::convolve_same;
use crate::rng::RandomSource;
use crate::waveform::{energy, Waveform};

/// Hammerstein-style convolutive noise:
/// `y[n] = sum_j g_j * (b_j * x^j)[n]` over orders `j = 1..=N_f`, where `x^j` is
/// the elementwise power and `*` is causal same-length convolution.
pub fn apply_convolutive(x: &Waveform, cfg: &ConvolutiveConfig) -> Waveform {
    let samples = x.samples();
    let mut y = vec![0.0; samples.len()];
    for (idx, order) in cfg.orders().iter().enumerate() {
        let power = (idx + 1) as i32;
        let xj: Vec<f64> = samples.iter().map(|s| s.powi(power)).collect();
        let filtered = convolve_same(&xj, &order.filter);
        let g = order.gain();
        for (yn, fn_) in y.iter_mut().zip(&filtered) {
            *yn += g * fn_;
        }
    }
    x.with_samples(y)
}

/// A draw from the symmetric impulse-amplitude density `-ln|r|` on `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrSample(f64);

impl DrSample {
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn magnitude(self) -> f64 {
        self.0.abs()
    }
}

/// Fair sign times the product of two uniforms on `(0, 1]`. The product has
/// density `-ln m` on `(0, 1]`.
pub fn sample_dr(rng: &mut RandomSource) -> DrSample {
    let sign = rng.fair_sign();
    let magnitude = rng.uniform_open_closed() * rng.uniform_open_closed();
    DrSample(sign * magnitude)
}

/// Impulsive signal-dependent noise: `P = round(p_rel * l)` distinct positions
/// are drawn uniformly; each receives `y[n] = x[n] + g_sd * d_n * x[n]`.
/// All other samples are copied unchanged.
pub fn apply_impulsive(x: &Waveform, cfg: &ImpulsiveConfig, rng: &mut RandomSource) -> Waveform {
    let l = x.len();
    let count = cfg.impulse_count(l);
    let mut y = x.samples().to_vec();
    let positions = rand::seq::index::sample(rng, l, count);
    for n in positions.iter() {
        let d = sample_dr(rng).value();
        y[n] = y[n] + cfg.g_sd * d * y[n];
    }
    x.with_samples(y)
}

/// Stationary coloured noise at a target SNR.
///
/// White Gaussian noise is coloured by the config's filter and scaled by
/// `g = sqrt(E_x / (E_z * 10^(snr/10)))`, so that `10 log10(E_x / E_{gz})`
/// equals the drawn SNR.
pub fn apply_stationary(
    x: &Waveform,
    cfg: &StationaryConfig,
    rng: &mut RandomSource,
) -> Result<Waveform> {
    let signal_energy = x.energy();
    if !(signal_energy > 0.0) {
        return Err(Error::DegenerateInput(
            "zero-energy input, SNR is undefined".into(),
        ));
    }
    let white: Vec<f64> = (0..x.len()).map(|_| rng.standard_normal()).collect();
    let colored = convolve_same(&white, &cfg.coloring_filter);
    let noise_energy = energy(&colored);
    if !(noise_energy > 0.0) {
        return Err(Error::DegenerateFilter);
    }
    let gain = (signal_energy / (noise_energy * 10f64.powf(cfg.snr_db / 10.0))).sqrt();
    let y = x
        .samples()
        .iter()
        .zip(&colored)
        .map(|(s, z)| s + gain * z)
        .collect();
    Ok(x.with_samples(y))
}

/// `10 log10(sum clean^2 / sum (noisy - clean)^2)`.
pub fn measured_snr_db(clean: &[f64], noisy: &[f64]) -> f64 {
    let noise: f64 = clean
        .iter()
        .zip(noisy)
        .map(|(c, n)| (n - c) * (n - c))
        .sum();
    10.0 * (energy(clean) / noise).log10()
}
