mod common;

use common::trig_poly;
use proptest::prelude::*;
use toephank_core::symbol::{
    cp_constant, fourier_coefficients, mp_norm_interval, sup_norm, wiener_norm, SymbolSpec,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coefficients_reproduce_grid_samples(seq in trig_poly(6)) {
        let spec = SymbolSpec::fourier_poly(seq.clone());
        let grid = 64;
        let coeffs = fourier_coefficients(&spec, seq.window(), grid).unwrap();
        let samples = spec.grid_samples(grid).unwrap();
        let scale = samples.iter().map(|z| z.norm()).fold(f64::MIN_POSITIVE, f64::max);
        for (m, z) in samples.iter().enumerate() {
            let theta = 2.0 * std::f64::consts::PI * m as f64 / grid as f64;
            prop_assert!((coeffs.eval_trig(theta) - z).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn wiener_dominates_sup_dominates_coefficients(seq in trig_poly(8)) {
        let w = wiener_norm(&seq).unwrap();
        let s = sup_norm(&SymbolSpec::fourier_poly(seq.clone()), 1024).unwrap();
        let slack = 1e-12 * w.max(1.0);
        prop_assert!(s <= w + slack);
        for (_, v) in seq.iter() {
            prop_assert!(v.norm() <= s + slack);
        }
    }

    #[test]
    fn two_norm_interval_is_tight(seq in trig_poly(8)) {
        let est = mp_norm_interval(&seq, 2.0, 512).unwrap();
        prop_assert!(est.lower <= est.upper);
        prop_assert!(est.upper - est.lower <= 1e-6 * est.upper);
    }

    #[test]
    fn cp_is_symmetric_under_duality(p in 1.1f64..10.0) {
        let q = p / (p - 1.0);
        prop_assert!((cp_constant(p).unwrap() - cp_constant(q).unwrap()).abs() <= 1e-14);
    }
}
