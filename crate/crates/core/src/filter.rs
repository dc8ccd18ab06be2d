//! Window-method design of notch and multi-band FIR filters.
//!
//! A notch is designed by frequency sampling: the desired amplitude (1 in the
//! pass band, 0 in the stop band) is sampled on a 512-point grid over
//! `[0, fs/2]`, transformed back to a zero-phase impulse response with an
//! inverse real DFT, truncated to the requested length around its centre and
//! tapered with a Hamming window. Several notches are combined into one
//! multi-band filter by cascading (convolving) their impulse responses.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of frequency samples over `[0, fs/2]` used by the design.
pub const DESIGN_GRID_POINTS: usize = 512;

/// Normalised transition width (cycles/sample) of a Hamming-windowed design,
/// times the filter length.
pub const HAMMING_TRANSITION_WIDTH: f64 = 3.3;

/// A single stop band: centre frequency and width in Hz, plus the tap count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NotchSpec {
    pub f_c: f64,
    pub delta_f: f64,
    pub n_taps: usize,
}

impl NotchSpec {
    pub fn new(f_c: f64, delta_f: f64, n_taps: usize) -> Self {
        Self {
            f_c,
            delta_f,
            n_taps,
        }
    }

    /// Builds a spec from normalised frequencies (Nyquist at 0.5).
    pub fn normalized(f_c: f64, delta_f: f64, n_taps: usize, fs: f64) -> Self {
        Self::new(f_c * fs, delta_f * fs, n_taps)
    }

    /// Length of the designed filter.
    ///
    /// A symmetric filter of even length always has a zero at Nyquist, which
    /// contradicts a notch's unit pass band there, so even tap counts are
    /// designed with one extra tap.
    pub fn design_taps(&self) -> usize {
        self.n_taps | 1
    }

    /// Stop band after clamping to `(0, fs/2)`.
    pub fn stop_band(&self, fs: f64) -> Result<(f64, f64)> {
        if !(self.f_c.is_finite() && self.delta_f.is_finite()) {
            return Err(Error::InvalidNotch("frequencies must be finite".into()));
        }
        if self.delta_f <= 0.0 {
            return Err(Error::InvalidNotch(format!(
                "width must be positive, got {}",
                self.delta_f
            )));
        }
        if self.n_taps < 3 {
            return Err(Error::InvalidNotch(format!(
                "at least 3 taps required, got {}",
                self.n_taps
            )));
        }
        if !(fs.is_finite() && fs > 0.0) {
            return Err(Error::InvalidNotch(format!("invalid sample rate {fs}")));
        }
        let nyquist = fs / 2.0;
        let lo = (self.f_c - self.delta_f / 2.0).max(0.0);
        let hi = (self.f_c + self.delta_f / 2.0).min(nyquist);
        if hi <= lo {
            return Err(Error::DegenerateNotch {
                lo: self.f_c - self.delta_f / 2.0,
                hi: self.f_c + self.delta_f / 2.0,
                nyquist,
            });
        }
        Ok((lo, hi))
    }
}

/// Finite impulse response filter coefficients `b_0 .. b_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct FirFilter {
    coefficients: Vec<f64>,
}

impl FirFilter {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidFilter("no coefficients".into()));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidFilter("non-finite coefficient".into()));
        }
        Ok(Self { coefficients })
    }

    pub fn unit_impulse() -> Self {
        Self {
            coefficients: vec![1.0],
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }
}

/// Symmetric Hamming window value for tap `n` of a length-`len` window.
fn hamming(n: usize, len: usize) -> f64 {
    if len == 1 {
        return 1.0;
    }
    0.54 - 0.46 * (2.0 * PI * n as f64 / (len - 1) as f64).cos()
}

fn merge_bands(bands: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut sorted: Vec<(f64, f64)> = bands.iter().copied().filter(|(lo, hi)| hi > lo).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
    for (lo, hi) in sorted {
        match merged.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    merged
}

/// Desired amplitude on the design grid. Each grid point owns the cell of
/// width one grid step centred on it; the amplitude is the fraction of that
/// cell lying in the pass band, which interpolates linearly across band edges.
fn desired_response(bands: &[(f64, f64)], nyquist: f64) -> Vec<f64> {
    let bands = merge_bands(bands);
    let step = nyquist / (DESIGN_GRID_POINTS - 1) as f64;
    (0..DESIGN_GRID_POINTS)
        .map(|k| {
            let f = k as f64 * step;
            let a = (f - step / 2.0).max(0.0);
            let b = (f + step / 2.0).min(nyquist);
            let stopped: f64 = bands
                .iter()
                .map(|&(lo, hi)| (b.min(hi) - a.max(lo)).max(0.0))
                .sum();
            (1.0 - stopped / (b - a)).clamp(0.0, 1.0)
        })
        .collect()
}

/// Frequency-sampling design of a linear-phase band-stop filter with the given
/// stop bands (in Hz). An empty band list yields the all-pass design.
pub fn design_bandstop(stop_bands: &[(f64, f64)], n_taps: usize, fs: f64) -> FirFilter {
    assert!(n_taps >= 1, "filter needs at least one tap");
    let taps = n_taps | 1;
    let desired = desired_response(stop_bands, fs / 2.0);

    // Inverse real DFT of the zero-phase spectrum, period 2(M-1).
    let m = DESIGN_GRID_POINTS;
    let period = 2 * (m - 1);
    let cos_table: Vec<f64> = (0..period)
        .map(|q| (PI * q as f64 / (m - 1) as f64).cos())
        .collect();
    let centre = (taps - 1) / 2;
    let mut coefficients = vec![0.0; taps];
    for offset in 0..=centre {
        let nyquist_term = if offset % 2 == 0 {
            desired[m - 1]
        } else {
            -desired[m - 1]
        };
        let mut acc = desired[0] + nyquist_term;
        for (k, d) in desired.iter().enumerate().take(m - 1).skip(1) {
            acc += 2.0 * d * cos_table[(k * offset) % period];
        }
        let value = acc / period as f64 * hamming(centre + offset, taps);
        coefficients[centre + offset] = value;
        coefficients[centre - offset] = value;
    }
    FirFilter { coefficients }
}

/// Designs one notch filter of `spec.design_taps()` coefficients.
pub fn design_notch_fir(spec: &NotchSpec, fs: f64) -> Result<FirFilter> {
    let band = spec.stop_band(fs)?;
    Ok(design_bandstop(&[band], spec.n_taps, fs))
}

/// Linear convolution of all impulse responses.
pub fn cascade(filters: &[FirFilter]) -> Result<FirFilter> {
    let (first, rest) = filters.split_first().ok_or(Error::EmptyCascade)?;
    let mut acc = first.coefficients.clone();
    for f in rest {
        let mut out = vec![0.0; acc.len() + f.len() - 1];
        for (i, a) in acc.iter().enumerate() {
            for (j, b) in f.coefficients.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        acc = out;
    }
    Ok(FirFilter { coefficients: acc })
}

/// Designs each notch separately and cascades them into a single filter.
pub fn design_multiband_fir(notches: &[NotchSpec], fs: f64) -> Result<FirFilter> {
    if notches.is_empty() {
        return Ok(FirFilter::unit_impulse());
    }
    let filters = notches
        .iter()
        .map(|n| design_notch_fir(n, fs))
        .collect::<Result<Vec<_>>>()?;
    cascade(&filters)
}

/// Magnitude of the filter's DTFT at `freq` Hz.
pub fn magnitude_at(filter: &FirFilter, freq: f64, fs: f64) -> f64 {
    let w = 2.0 * PI * freq / fs;
    let (mut re, mut im) = (0.0, 0.0);
    for (n, b) in filter.coefficients.iter().enumerate() {
        let (s, c) = (w * n as f64).sin_cos();
        re += b * c;
        im -= b * s;
    }
    re.hypot(im)
}

pub fn magnitude_db_at(filter: &FirFilter, freq: f64, fs: f64) -> f64 {
    20.0 * magnitude_at(filter, freq, fs)
        .max(f64::MIN_POSITIVE)
        .log10()
}

/// `(frequency Hz, magnitude dB)` at `n_points` uniform frequencies over `[0, fs/2]`.
pub fn frequency_response(filter: &FirFilter, n_points: usize, fs: f64) -> Vec<(f64, f64)> {
    assert!(n_points >= 2, "frequency response needs at least 2 points");
    let nyquist = fs / 2.0;
    (0..n_points)
        .map(|k| {
            let f = nyquist * k as f64 / (n_points - 1) as f64;
            (f, magnitude_db_at(filter, f, fs))
        })
        .collect()
}

/// Writes a response as two-column CSV with a `frequency_hz,magnitude_db` header.
pub fn write_response_csv<W: Write>(mut out: W, response: &[(f64, f64)]) -> std::io::Result<()> {
    writeln!(out, "frequency_hz,magnitude_db")?;
    for (f, db) in response {
        writeln!(out, "{f},{db}")?;
    }
    out.flush()
}

/// Causal filtering with zero initial state, truncated to the input length:
/// `y[n] = sum_i b_i * x[n - i]`, with `x[m] = 0` for `m < 0`.
pub fn convolve_same(x: &[f64], filter: &FirFilter) -> Vec<f64> {
    let l = x.len();
    let mut y = vec![0.0; l];
    for (i, &b) in filter.coefficients.iter().enumerate().take(l) {
        for (yn, xn) in y[i..].iter_mut().zip(&x[..l - i]) {
            *yn += b * xn;
        }
    }
    y
}

/// Attenuation of one notch inside a (possibly multi-band) filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NotchDepth {
    pub f_c: f64,
    /// Whether the clamped stop band is at least one Hamming transition wide.
    pub resolvable: bool,
    /// Mean pass-band level minus the level at `f_c`, in dB. `None` when no
    /// grid point lies clear of every stop band.
    pub depth_db: Option<f64>,
}

/// Measures how far each notch's centre sits below the mean pass-band level of
/// `filter`. The pass band is every design-grid point further than one
/// transition width from all stop bands.
pub fn notch_depths(filter: &FirFilter, notches: &[NotchSpec], fs: f64) -> Result<Vec<NotchDepth>> {
    let guarded = notches
        .iter()
        .map(|n| {
            let (lo, hi) = n.stop_band(fs)?;
            let tw = HAMMING_TRANSITION_WIDTH * fs / n.design_taps() as f64;
            Ok((lo, hi, tw))
        })
        .collect::<Result<Vec<_>>>()?;
    let response = frequency_response(filter, DESIGN_GRID_POINTS, fs);
    let pass: Vec<f64> = response
        .iter()
        .filter(|(f, _)| {
            guarded
                .iter()
                .all(|&(lo, hi, tw)| *f < lo - tw || *f > hi + tw)
        })
        .map(|&(_, db)| db)
        .collect();
    let mean_pass = (!pass.is_empty()).then(|| pass.iter().sum::<f64>() / pass.len() as f64);
    Ok(notches
        .iter()
        .zip(&guarded)
        .map(|(n, &(lo, hi, tw))| NotchDepth {
            f_c: n.f_c,
            resolvable: hi - lo >= tw,
            depth_db: mean_pass.map(|m| m - magnitude_db_at(filter, n.f_c, fs)),
        })
        .collect())
}

/// Indices of strict interior local minima of a response.
pub fn local_minima(response: &[(f64, f64)]) -> Vec<usize> {
    response
        .windows(3)
        .enumerate()
        .filter(|(_, w)| w[1].1 < w[0].1 && w[1].1 < w[2].1)
        .map(|(i, _)| i + 1)
        .collect()
}
