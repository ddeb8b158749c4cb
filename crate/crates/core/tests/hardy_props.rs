mod common;

use common::{c, complex, trig_poly};
use proptest::prelude::*;
use toephank_core::hardy::{
    flip_multiplier_norm, form_table, hp_norm, hp_opnorm_lower, lemma_profile, CoeffPolynomial, FormKind,
    HardyBudget,
};
use toephank_core::norms::{matrix_pnorm, PNormRequest};
use toephank_core::operators::{IndexRange, OperatorSpec};
use toephank_core::symbol::{cp_constant, fourier_coefficients, sup_norm, Arc, ClosedForm, SymbolSpec};

fn step(breaks: &[f64], levels: &[num_complex::Complex64]) -> SymbolSpec {
    let mut arcs = Vec::new();
    let pi = std::f64::consts::PI;
    let mut start = -pi;
    for (i, level) in levels.iter().enumerate() {
        let end = if i + 1 == levels.len() { pi } else { breaks[i] };
        arcs.push(Arc { start, end, expr: ClosedForm::Constant { value: *level } });
        start = end;
    }
    SymbolSpec::piecewise(arcs).unwrap()
}

fn piecewise_constant() -> impl Strategy<Value = SymbolSpec> {
    (prop::collection::vec(-3.0f64..3.0, 1..4), prop::collection::vec(complex(), 4))
        .prop_map(|(mut b, levels)| {
            b.sort_by(f64::total_cmp);
            b.dedup_by(|x, y| (*x - *y).abs() < 1e-3);
            step(&b, &levels[..=b.len()])
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn form_tables_read_coefficients(
        symbol in prop_oneof![trig_poly(6).prop_map(SymbolSpec::fourier_poly), piecewise_constant()],
        m in 1usize..10,
    ) {
        let grid = 1 << 14;
        let t = form_table(&symbol, FormKind::Toeplitz, m, grid).unwrap();
        let h = form_table(&symbol, FormKind::Hankel, m, grid).unwrap();
        let lag = m as i64;
        let coeffs = fourier_coefficients(&symbol, IndexRange::new(-lag, 2 * lag).unwrap(), grid).unwrap();
        for j in 0..m {
            for k in 0..m {
                let (jt, kt) = (j as i64, k as i64);
                prop_assert!((t.entries.at(j, k) - coeffs.get(jt - kt).unwrap()).norm() <= 1e-10);
                prop_assert!((h.entries.at(j, k) - coeffs.get(jt + kt + 1).unwrap()).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn h2_norm_is_coefficient_norm(coeffs in prop::collection::vec(complex(), 1..20)) {
        let f = CoeffPolynomial::new(coeffs.clone()).unwrap();
        let l2 = coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let grid = 8 * (f.degree() + 1);
        prop_assert!((hp_norm(&f, 2.0, grid).unwrap() - l2).abs() <= 1e-12 * l2.max(1.0));
    }

    #[test]
    fn multiplier_without_flip_is_sup_norm(seq in trig_poly(4), p in prop_oneof![Just(1.0), Just(2.0), 1.0f64..6.0]) {
        let a = SymbolSpec::fourier_poly(seq);
        let zero = SymbolSpec::constant(c(0.0));
        let flip = flip_multiplier_norm(&a, &zero, p, 8192).unwrap();
        let sup = sup_norm(&a, 4096).unwrap();
        prop_assert!(flip <= sup * (1.0 + 1e-12) && flip >= sup * (1.0 - 1e-6), "{flip} vs {sup}");
    }

    #[test]
    fn lemma_profile_climbs_to_sup(seq in trig_poly(4)) {
        let a = SymbolSpec::fourier_poly(seq);
        let s = sup_norm(&a, 1024).unwrap();
        let profile = lemma_profile(&a, 64, 1024).unwrap();
        prop_assert!(profile.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(*profile.last().unwrap() <= s * (1.0 + 1e-9));
        prop_assert!(*profile.last().unwrap() >= 0.95 * s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn hardy_lower_bound_sits_in_sandwich(seq in trig_poly(3), p in prop_oneof![Just(1.5), Just(3.0), Just(4.0)]) {
        let a = SymbolSpec::fourier_poly(seq);
        let budget = HardyBudget { starts: 4, iters: 40, ..HardyBudget::default() };
        let r = hp_opnorm_lower(&a, None, p, 8, &budget).unwrap();
        let s = sup_norm(&a, 1024).unwrap();
        let tol = budget.tol * s.max(1.0);
        prop_assert!(r.estimate.lower >= s - tol);
        prop_assert!(r.estimate.lower <= cp_constant(p).unwrap() * s + tol);
    }

    #[test]
    fn flip_formula_matches_sections(a in trig_poly(2), cc in trig_poly(2)) {
        let formula = flip_multiplier_norm(
            &SymbolSpec::fourier_poly(a.clone()),
            &SymbolSpec::fourier_poly(cc.clone()),
            2.0,
            4096,
        )
        .unwrap();
        let spec = OperatorSpec::Sum(vec![
            OperatorSpec::Laurent(a),
            OperatorSpec::Compose(vec![OperatorSpec::Laurent(cc), OperatorSpec::Flip]),
        ]);
        let w = IndexRange::symmetric(256);
        let section = matrix_pnorm(&spec.section(w, w).unwrap(), &PNormRequest::new(2.0)).unwrap().lower;
        prop_assert!((formula - section).abs() <= 0.02 * formula.max(1e-12), "{formula} vs {section}");
    }
}
