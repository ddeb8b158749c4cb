mod common;

use common::{complex, dyadic, finite, trig_poly};
use num_complex::Complex64;
use proptest::prelude::*;
use toephank_core::displacement::{displacement_transform, extract, is_checkerboard, is_hankel, is_toeplitz};
use toephank_core::norms::{matrix_pnorm, PNormRequest};
use toephank_core::operators::{FiniteSection, IndexRange, OperatorSpec};
use toephank_core::symbol::FourierSequence;

fn th(phi: FourierSequence, psi: FourierSequence) -> OperatorSpec {
    OperatorSpec::Sum(vec![OperatorSpec::Toeplitz(phi), OperatorSpec::Hankel(psi)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn extraction_roundtrips(
        phi in trig_poly(12),
        psi in prop::collection::vec(complex(), 1..30),
        n in 3usize..40,
    ) {
        let w = IndexRange::first(n);
        let a = th(phi, finite(1, psi)).section(w, w).unwrap();
        let dec = extract(&a, 1e-12).unwrap();
        prop_assert!(a.max_abs_diff(&dec.reconstruct().unwrap()).unwrap() <= 1e-12);
    }

    #[test]
    fn displacement_vanishes_on_sums(
        phi in trig_poly(12),
        psi in prop::collection::vec(complex(), 1..30),
        even in complex(),
        odd in complex(),
        n in 3usize..30,
    ) {
        let w = IndexRange::first(n);
        let spec = OperatorSpec::Sum(vec![
            th(phi, finite(1, psi)),
            OperatorSpec::Checkerboard { even, odd },
        ]);
        let a = spec.section(w, w).unwrap();
        let d = displacement_transform(&a).unwrap();
        // four terms of modulus ≤ max|A|; cancellation error is a few ulps of that
        prop_assert!(d.max_abs() <= 8.0 * f64::EPSILON * a.max_abs());
    }

    #[test]
    fn checkerboard_iff_toeplitz_and_hankel(
        kind in 0u8..4,
        phi in trig_poly(4),
        entries in common::matrix(6, 6),
        even in complex(),
        odd in complex(),
        tol in prop_oneof![Just(0.0), Just(1e-12), Just(0.5)],
    ) {
        let w = IndexRange::first(6);
        let a = match kind {
            0 => OperatorSpec::Toeplitz(phi).section(w, w).unwrap(),
            1 => OperatorSpec::Hankel(phi.shifted(5)).section(w, w).unwrap(),
            2 => OperatorSpec::Checkerboard { even, odd }.section(w, w).unwrap(),
            _ => FiniteSection::new(w, w, entries).unwrap(),
        };
        prop_assert_eq!(is_checkerboard(&a, tol), is_toeplitz(&a, tol) && is_hankel(&a, tol));
    }

    #[test]
    fn checkerboard_sections_grow(even in complex(), odd in complex(), n in 2usize..64) {
        prop_assume!(even.norm().max(odd.norm()) > 1e-3);
        let norm = |n: usize| {
            let w = IndexRange::first(n);
            let s = OperatorSpec::Checkerboard { even, odd }.section(w, w).unwrap();
            matrix_pnorm(&s, &PNormRequest::new(2.0)).unwrap().lower
        };
        let (small, big) = (norm(n), norm(2 * n));
        let m = even.norm().max(odd.norm());
        prop_assert!(small >= (n as f64 / 2.0) * m * (1.0 - 1e-12));
        if n >= 8 {
            prop_assert!(big / small >= 1.5);
        }
    }

    #[test]
    fn extraction_is_idempotent_on_dyadic_input(
        phi in prop::collection::vec(dyadic(), 1..15),
        psi in prop::collection::vec(dyadic(), 1..20),
        n in 4usize..24,
    ) {
        let w = IndexRange::first(n);
        let a = th(finite(-7, phi), finite(1, psi)).section(w, w).unwrap();
        let first = extract(&a, 1e-12).unwrap();
        let second = extract(&first.reconstruct().unwrap(), 1e-12).unwrap();
        prop_assert_eq!(&first.toeplitz_part, &second.toeplitz_part);
        prop_assert_eq!(&first.hankel_part, &second.hankel_part);
        prop_assert_eq!(first.checkerboard, second.checkerboard);
        prop_assert_eq!(first.canonical, second.canonical);
    }
}

#[test]
fn tail_constants_move_into_the_checkerboard() {
    // ψ with parity limits 2 (odd) and -1 (even) plus a fading part
    let psi = FourierSequence::from_fn(1, 200, toephank_core::symbol::DecayClass::Bounded, |j| {
        Complex64::new(if j % 2 == 1 { 2.0 } else { -1.0 }, 0.0) + Complex64::new(0.0, 0.5f64.powi(j as i32))
    });
    let w = IndexRange::first(32);
    let a = OperatorSpec::Hankel(psi).section(w, w).unwrap();
    let dec = extract(&a, 1e-12).unwrap();
    assert!(dec.canonical);
    assert!(a.max_abs_diff(&dec.reconstruct().unwrap()).unwrap() <= 1e-12);
}
