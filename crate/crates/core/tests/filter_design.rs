use proptest::prelude::*;
use rawboost::filter::{
    cascade, convolve_same, design_bandstop, design_multiband_fir, design_notch_fir,
    frequency_response, local_minima, notch_depths, DESIGN_GRID_POINTS, HAMMING_TRANSITION_WIDTH,
};
use rawboost::{FirFilter, NotchSpec};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

const FS: f64 = 16_000.0;

/// Magnitude response in dB via a zero-padded FFT of length 2(M-1), which puts
/// bin k at k * (fs/2) / (M-1), the same grid as `frequency_response(.., M, ..)`.
fn fft_response_db(coeffs: &[f64], points: usize) -> Vec<f64> {
    let n = 2 * (points - 1);
    assert!(coeffs.len() <= n);
    let mut buf: Vec<Complex<f64>> = (0..n)
        .map(|i| Complex::new(coeffs.get(i).copied().unwrap_or(0.0), 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf[..points]
        .iter()
        .map(|c| 20.0 * c.norm().log10())
        .collect()
}

fn example_notches() -> Vec<NotchSpec> {
    vec![
        NotchSpec::normalized(0.01, 0.06, 30, FS),
        NotchSpec::normalized(0.35, 0.03, 94, FS),
        NotchSpec::normalized(0.45, 0.02, 52, FS),
    ]
}

#[test]
fn dtft_matches_fft_oracle() {
    let h = design_multiband_fir(&example_notches(), FS).unwrap();
    let lib = frequency_response(&h, DESIGN_GRID_POINTS, FS);
    let oracle = fft_response_db(h.coefficients(), DESIGN_GRID_POINTS);
    for ((_, a), b) in lib.iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }
}

#[test]
fn cascade_response_is_sum_of_responses_in_db() {
    let notches = example_notches();
    let singles: Vec<FirFilter> = notches
        .iter()
        .map(|n| design_notch_fir(n, FS).unwrap())
        .collect();
    let combined = cascade(&singles).unwrap();
    let lib = frequency_response(&combined, DESIGN_GRID_POINTS, FS);
    let parts: Vec<Vec<f64>> = singles
        .iter()
        .map(|h| fft_response_db(h.coefficients(), DESIGN_GRID_POINTS))
        .collect();
    for (k, (_, db)) in lib.iter().enumerate() {
        let sum: f64 = parts.iter().map(|p| p[k]).sum();
        assert!((db - sum).abs() < 1e-6, "bin {k}: {db} vs {sum}");
    }
}

#[test]
fn multiband_design_matches_its_parts() {
    let notches = example_notches();
    let h = design_multiband_fir(&notches, FS).unwrap();
    let lens: usize = notches.iter().map(|n| n.design_taps()).sum();
    assert_eq!(h.len(), lens - 2);
}

#[test]
fn inner_notches_are_local_minima() {
    let h = design_multiband_fir(&example_notches(), FS).unwrap();
    let resp = frequency_response(&h, DESIGN_GRID_POINTS, FS);
    let bin = FS / 2.0 / (DESIGN_GRID_POINTS - 1) as f64;
    let minima = local_minima(&resp);
    for centre in [0.35, 0.45] {
        assert!(
            minima
                .iter()
                .any(|&i| (resp[i].0 - centre * FS).abs() <= bin),
            "no minimum near {centre}"
        );
    }
}

#[test]
fn default_ranges_give_five_notch_filters() {
    let ranges = rawboost::ParameterRanges::default();
    let mut rng = rawboost::derive_utterance_rng(8, b"multiband");
    let cfg = rawboost::sampling::sample_stationary_config(&ranges, 16_000, &mut rng).unwrap();
    assert_eq!(cfg.notches.len(), 5);
    let expected: usize = cfg.notches.iter().map(|n| n.design_taps()).sum::<usize>() - 4;
    assert_eq!(cfg.coloring_filter.len(), expected);
}

fn arb_filter(max_len: usize) -> impl Strategy<Value = FirFilter> {
    prop::collection::vec(-1.0f64..1.0, 1..=max_len).prop_map(|c| FirFilter::new(c).unwrap())
}

fn approx_eq(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

proptest! {
    #[test]
    fn designed_notches_are_symmetric(
        f_c in 0.0f64..8000.0, width in 10.0f64..3000.0, taps in 3usize..=101,
    ) {
        let spec = NotchSpec::new(f_c, width, taps);
        let h = design_notch_fir(&spec, FS).unwrap();
        prop_assert_eq!(h.len(), spec.design_taps());
        let b = h.coefficients();
        for i in 0..b.len() {
            prop_assert!((b[i] - b[b.len() - 1 - i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn all_pass_design_stays_within_half_db(taps in 3usize..=201) {
        let h = design_bandstop(&[], taps, FS);
        for (_, db) in frequency_response(&h, DESIGN_GRID_POINTS, FS) {
            prop_assert!(db.abs() < 0.5);
        }
    }

    #[test]
    fn resolvable_notches_are_at_least_6db_deep(
        taps in 7usize..=101, width_factor in 1.0f64..4.0, centre in 0.0f64..1.0,
    ) {
        let n_eff = (taps | 1) as f64;
        let width = (HAMMING_TRANSITION_WIDTH / n_eff * width_factor).min(0.45);
        let f_c = centre * 0.5;
        let spec = NotchSpec::normalized(f_c, width, taps, FS);
        let (lo, hi) = spec.stop_band(FS).unwrap();
        prop_assume!((hi - lo) / FS >= HAMMING_TRANSITION_WIDTH / n_eff);
        let h = design_notch_fir(&spec, FS).unwrap();
        let depth = notch_depths(&h, &[spec], FS).unwrap()[0];
        prop_assert!(depth.resolvable);
        if let Some(d) = depth.depth_db {
            prop_assert!(d >= 6.0, "depth {} dB", d);
        }
    }

    #[test]
    fn cascade_is_commutative_and_associative(
        a in arb_filter(12), b in arb_filter(12), c in arb_filter(12),
    ) {
        let ab = cascade(&[a.clone(), b.clone()]).unwrap();
        let ba = cascade(&[b.clone(), a.clone()]).unwrap();
        prop_assert!(approx_eq(ab.coefficients(), ba.coefficients(), 1e-12));
        let left = cascade(&[ab, c.clone()]).unwrap();
        let bc = cascade(&[b, c]).unwrap();
        let right = cascade(&[a, bc]).unwrap();
        prop_assert!(approx_eq(left.coefficients(), right.coefficients(), 1e-12));
    }

    #[test]
    fn convolve_same_is_linear(
        x in prop::collection::vec(-1.0f64..1.0, 1..128),
        seed in prop::collection::vec(-1.0f64..1.0, 128),
        h in arb_filter(16),
        a in -2.0f64..2.0, b in -2.0f64..2.0,
    ) {
        let z = &seed[..x.len()];
        let mix: Vec<f64> = x.iter().zip(z).map(|(xi, zi)| a * xi + b * zi).collect();
        let lhs = convolve_same(&mix, &h);
        let cx = convolve_same(&x, &h);
        let cz = convolve_same(z, &h);
        let rhs: Vec<f64> = cx.iter().zip(&cz).map(|(p, q)| a * p + b * q).collect();
        prop_assert_eq!(lhs.len(), x.len());
        prop_assert!(approx_eq(&lhs, &rhs, 1e-12));
    }
}
