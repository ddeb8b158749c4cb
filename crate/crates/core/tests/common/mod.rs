#![allow(dead_code)]

use num_complex::Complex64;
use proptest::prelude::*;
use toephank_core::symbol::{DecayClass, FourierSequence};

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

/// Dyadic rationals `k/8`, so sums and differences stay exact.
pub fn dyadic() -> impl Strategy<Value = Complex64> {
    (-16i32..=16, -16i32..=16).prop_map(|(a, b)| Complex64::new(a as f64 / 8.0, b as f64 / 8.0))
}

/// Trigonometric polynomial with support inside `[-max_deg, max_deg]`.
pub fn trig_poly(max_deg: i64) -> impl Strategy<Value = FourierSequence> {
    (-max_deg..=0, 1..=(max_deg as usize + 1))
        .prop_flat_map(|(lo, len)| (Just(lo), prop::collection::vec(complex(), len)))
        .prop_map(|(lo, v)| FourierSequence::trig_poly(lo, v).unwrap())
}

/// Finitely supported sequence on `[lo, hi]` with the given entries.
pub fn finite(lo: i64, values: Vec<Complex64>) -> FourierSequence {
    FourierSequence::new(lo, values, DecayClass::FiniteSupport).unwrap()
}

pub fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(complex(), rows * cols)
}
