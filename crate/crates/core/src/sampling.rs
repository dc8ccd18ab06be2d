//! Uniform sampling of technique parameters from [`ParameterRanges`].

use crate::config::{
    ConvolutiveConfig, ImpulsiveConfig, OrderParams, StationaryConfig, StationaryParams,
};
use crate::error::Result;
use crate::filter::NotchSpec;
use crate::ranges::ParameterRanges;
use crate::rng::RandomSource;

fn sample_notches(ranges: &ParameterRanges, rng: &mut RandomSource) -> Vec<NotchSpec> {
    (0..ranges.n_notch)
        .map(|_| {
            let f_c = rng.uniform(ranges.f_c_range[0], ranges.f_c_range[1]);
            let delta_f = rng.uniform(ranges.delta_f_range[0], ranges.delta_f_range[1]);
            let n_fir = rng.uniform_int(ranges.n_fir_range[0], ranges.n_fir_range[1]);
            NotchSpec::new(f_c, delta_f, n_fir + 1)
        })
        .collect()
}

pub fn sample_convolutive_config(
    ranges: &ParameterRanges,
    sample_rate: u32,
    rng: &mut RandomSource,
) -> Result<ConvolutiveConfig> {
    ranges.validate_for(sample_rate)?;
    let orders: Vec<OrderParams> = (1..=ranges.n_f)
        .map(|j| {
            let notches = sample_notches(ranges, rng);
            let gain_range = if j == 1 {
                ranges.g_cn_1_range
            } else {
                ranges.g_cn_higher_range
            };
            OrderParams {
                notches,
                gain_db: rng.uniform(gain_range[0], gain_range[1]),
            }
        })
        .collect();
    ConvolutiveConfig::from_params(&orders, sample_rate as f64)
}

pub fn sample_impulsive_config(
    ranges: &ParameterRanges,
    rng: &mut RandomSource,
) -> Result<ImpulsiveConfig> {
    ranges.validate()?;
    let percent = rng.uniform(ranges.p_rel_range[0], ranges.p_rel_range[1]);
    ImpulsiveConfig::new(percent / 100.0, ranges.g_sd)
}

pub fn sample_stationary_config(
    ranges: &ParameterRanges,
    sample_rate: u32,
    rng: &mut RandomSource,
) -> Result<StationaryConfig> {
    ranges.validate_for(sample_rate)?;
    let snr_db = rng.uniform(ranges.snr_range[0], ranges.snr_range[1]);
    let notches = sample_notches(ranges, rng);
    StationaryConfig::from_params(&StationaryParams { snr_db, notches }, sample_rate as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::db_to_linear;
    use crate::rng::derive_utterance_rng;

    const FS: u32 = 16_000;

    #[test]
    fn convolutive_defaults() {
        let ranges = ParameterRanges::default();
        let mut rng = derive_utterance_rng(5, b"utt");
        let cfg = sample_convolutive_config(&ranges, FS, &mut rng).unwrap();
        assert_eq!(cfg.orders().len(), 5);
        assert_eq!(cfg.orders()[0].gain(), 1.0);
        for o in &cfg.orders()[1..] {
            assert!(o.gain() >= 0.1 - 1e-15 && o.gain() <= db_to_linear(-5.0) + 1e-15);
        }
        for o in cfg.orders() {
            assert_eq!(o.notches.len(), 5);
            for n in &o.notches {
                assert!((11..=101).contains(&n.n_taps));
                assert!((11..=101).contains(&n.design_taps()));
            }
        }
    }

    #[test]
    fn single_order() {
        let ranges = ParameterRanges {
            n_f: 1,
            g_cn_1_range: [-3.0, -1.0],
            ..Default::default()
        };
        let mut rng = derive_utterance_rng(5, b"utt");
        let cfg = sample_convolutive_config(&ranges, FS, &mut rng).unwrap();
        assert_eq!(cfg.orders().len(), 1);
        assert!((-3.0..=-1.0).contains(&cfg.orders()[0].gain_db));
    }

    #[test]
    fn impulsive_defaults_and_degenerate() {
        let mut rng = derive_utterance_rng(1, b"a");
        let cfg = sample_impulsive_config(&ParameterRanges::default(), &mut rng).unwrap();
        assert!((0.0..=0.10).contains(&cfg.p_rel));
        assert_eq!(cfg.g_sd, 2.0);
        let zero = ParameterRanges {
            p_rel_range: [0.0, 0.0],
            ..Default::default()
        };
        assert_eq!(sample_impulsive_config(&zero, &mut rng).unwrap().p_rel, 0.0);
    }

    #[test]
    fn stationary_defaults_and_fixed_snr() {
        let mut rng = derive_utterance_rng(1, b"a");
        let cfg = sample_stationary_config(&ParameterRanges::default(), FS, &mut rng).unwrap();
        assert!((10.0..=40.0).contains(&cfg.snr_db));
        assert_eq!(cfg.notches.len(), 5);
        assert!(cfg.notches.iter().all(|n| (11..=101).contains(&n.n_taps)));
        let fixed = ParameterRanges {
            snr_range: [20.0, 20.0],
            ..Default::default()
        };
        assert_eq!(
            sample_stationary_config(&fixed, FS, &mut rng)
                .unwrap()
                .snr_db,
            20.0
        );
    }

    #[test]
    fn sampling_is_repeatable() {
        let ranges = ParameterRanges::default();
        let a = sample_convolutive_config(&ranges, FS, &mut derive_utterance_rng(3, b"k")).unwrap();
        let b = sample_convolutive_config(&ranges, FS, &mut derive_utterance_rng(3, b"k")).unwrap();
        assert_eq!(a, b);
        let a = sample_stationary_config(&ranges, FS, &mut derive_utterance_rng(3, b"k")).unwrap();
        let b = sample_stationary_config(&ranges, FS, &mut derive_utterance_rng(3, b"k")).unwrap();
        assert_eq!(a, b);
        let a = sample_impulsive_config(&ranges, &mut derive_utterance_rng(3, b"k")).unwrap();
        let b = sample_impulsive_config(&ranges, &mut derive_utterance_rng(3, b"k")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_ranges_are_rejected() {
        let bad = ParameterRanges {
            delta_f_range: [500.0, 100.0],
            ..Default::default()
        };
        let mut rng = derive_utterance_rng(0, b"");
        assert!(sample_convolutive_config(&bad, FS, &mut rng).is_err());
        assert!(sample_stationary_config(&bad, FS, &mut rng).is_err());
        assert!(sample_convolutive_config(&ParameterRanges::default(), 8000, &mut rng).is_err());
    }
}
