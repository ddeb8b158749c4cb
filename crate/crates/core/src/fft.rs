//! Thin wrappers over `rustfft` for uniform-grid quadrature on the circle.
//!
//! Grid points are `θ_m = 2πm/N`, `m = 0..N-1`.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// `(1/N) Σ_m samples[m] e^{-ijθ_m}` for every `j ∈ [lo, hi]`.
pub(crate) fn coefficients_from_samples(samples: &[Complex64], lo: i64, hi: i64) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf = samples.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    (lo..=hi)
        .map(|j| buf[j.rem_euclid(n as i64) as usize] * scale)
        .collect()
}

/// Values of `Σ_j c_j e^{ijθ_m}` on an `n`-point grid, where `coeffs[i]` belongs to index
/// `lo + i`. Indices are folded modulo `n`, which is exact evaluation at the grid points.
pub(crate) fn samples_from_coefficients(coeffs: &[Complex64], lo: i64, n: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (i, c) in coeffs.iter().enumerate() {
        let j = (lo + i as i64).rem_euclid(n as i64) as usize;
        buf[j] += c;
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    buf
}

pub(crate) fn grid_angle(m: usize, n: usize) -> f64 {
    2.0 * std::f64::consts::PI * m as f64 / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_and_inverse_are_consistent() {
        let coeffs = vec![
            Complex64::new(1.0, 0.5),
            Complex64::new(-2.0, 0.0),
            Complex64::new(0.25, -1.0),
        ];
        let s = samples_from_coefficients(&coeffs, -1, 16);
        let back = coefficients_from_samples(&s, -1, 1);
        for (a, b) in coeffs.iter().zip(&back) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
