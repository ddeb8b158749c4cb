//! Dense spectral computations backed by `faer`.
//!
//! Inputs are row-major complex buffers. Real and Hermitian structure is detected
//! exactly (no tolerance) and routed to the cheaper real or self-adjoint solvers;
//! Hermitian tridiagonal matrices use Sturm bisection.

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::{Error, Result};

fn is_real(a: &[Complex64]) -> bool {
    a.iter().all(|z| z.im == 0.0)
}

fn is_hermitian(a: &[Complex64], n: usize, m: usize) -> bool {
    n == m && (0..n).all(|i| (i..n).all(|j| a[i * n + j] == a[j * n + i].conj()))
}

fn is_tridiagonal(a: &[Complex64], n: usize) -> bool {
    (0..n).all(|i| (0..n).all(|j| i.abs_diff(j) <= 1 || a[i * n + j] == Complex64::new(0.0, 0.0)))
}

fn decomposition_error(e: impl std::fmt::Debug) -> Error {
    Error::Decomposition(format!("{e:?}"))
}

/// Eigenvalues of a Hermitian matrix, unordered.
fn hermitian_eigenvalues(a: &[Complex64], n: usize) -> Result<Vec<f64>> {
    if is_real(a) {
        Mat::<f64>::from_fn(n, n, |i, j| a[i * n + j].re)
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(decomposition_error)
    } else {
        Mat::<Complex64>::from_fn(n, n, |i, j| a[i * n + j])
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(decomposition_error)
    }
}

/// Singular values in descending order.
pub(crate) fn singular_values(a: &[Complex64], rows: usize, cols: usize) -> Result<Vec<f64>> {
    debug_assert_eq!(a.len(), rows * cols);
    let mut sv = if is_hermitian(a, rows, cols) {
        hermitian_eigenvalues(a, rows)?.into_iter().map(f64::abs).collect()
    } else if is_real(a) {
        Mat::<f64>::from_fn(rows, cols, |i, j| a[i * cols + j].re)
            .singular_values()
            .map_err(decomposition_error)?
    } else {
        Mat::<Complex64>::from_fn(rows, cols, |i, j| a[i * cols + j])
            .singular_values()
            .map_err(decomposition_error)?
    };
    sv.sort_by(|x, y| y.total_cmp(x));
    Ok(sv)
}

/// Largest singular value.
pub(crate) fn spectral_norm(a: &[Complex64], rows: usize, cols: usize) -> Result<f64> {
    if a.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Ok(0.0);
    }
    if is_hermitian(a, rows, cols) && is_tridiagonal(a, rows) {
        let d: Vec<f64> = (0..rows).map(|i| a[i * rows + i].re).collect();
        let e2: Vec<f64> = (1..rows).map(|i| a[(i - 1) * rows + i].norm_sqr()).collect();
        let (lo, hi) = tridiagonal_extremes(&d, &e2);
        return Ok(lo.abs().max(hi.abs()));
    }
    Ok(singular_values(a, rows, cols)?.first().copied().unwrap_or(0.0))
}

/// Number of eigenvalues strictly below `x` of the symmetric tridiagonal matrix with
/// diagonal `d` and squared off-diagonal moduli `e2`.
fn sturm_count(d: &[f64], e2: &[f64], x: f64) -> usize {
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut q = d[0] - x;
    let mut count = usize::from(q < 0.0);
    for i in 1..d.len() {
        if q == 0.0 {
            q = tiny;
        }
        q = d[i] - x - e2[i - 1] / q;
        count += usize::from(q < 0.0);
    }
    count
}

/// `(λ_min, λ_max)` by bisection inside the Gershgorin interval.
fn tridiagonal_extremes(d: &[f64], e2: &[f64]) -> (f64, f64) {
    let n = d.len();
    let e: Vec<f64> = e2.iter().map(|v| v.sqrt()).collect();
    let radius = |i: usize| {
        let left = if i > 0 { e[i - 1] } else { 0.0 };
        let right = if i + 1 < n { e[i] } else { 0.0 };
        left + right
    };
    let glo = (0..n).map(|i| d[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let ghi = (0..n).map(|i| d[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    let pad = 1e-300f64.max((ghi - glo).abs() * 1e-15);
    // k-th smallest eigenvalue: the least x with count(x) > k
    let kth = |k: usize| {
        let (mut a, mut b) = (glo - pad, ghi + pad);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if sturm_count(d, e2, mid) > k {
                b = mid;
            } else {
                a = mid;
            }
        }
        0.5 * (a + b)
    };
    (kth(0), kth(n - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn tridiag(n: usize) -> Vec<Complex64> {
        let mut a = vec![c(0.0); n * n];
        for i in 0..n - 1 {
            a[i * n + i + 1] = c(1.0);
            a[(i + 1) * n + i] = c(1.0);
        }
        a
    }

    #[test]
    fn tridiagonal_bisection_matches_closed_form() {
        for n in [2, 5, 33, 200] {
            let got = spectral_norm(&tridiag(n), n, n).unwrap();
            let exact = 2.0 * (PI / (n as f64 + 1.0)).cos();
            assert!((got - exact).abs() < 1e-13, "n={n}: {got} vs {exact}");
        }
    }

    #[test]
    fn general_paths_agree() {
        // [[1,2],[3,4]]: σ_max = sqrt((30 + sqrt(884)) / 2)
        let a = vec![c(1.0), c(2.0), c(3.0), c(4.0)];
        let exact = ((30.0 + 884f64.sqrt()) / 2.0).sqrt();
        assert!((spectral_norm(&a, 2, 2).unwrap() - exact).abs() < 1e-13);
        let ai: Vec<Complex64> = a.iter().map(|z| z * Complex64::new(0.0, 1.0)).collect();
        assert!((spectral_norm(&ai, 2, 2).unwrap() - exact).abs() < 1e-13);
        // dense Hermitian path, not tridiagonal
        let h = vec![c(2.0), c(0.0), c(1.0), c(0.0), c(3.0), c(0.0), c(1.0), c(0.0), c(2.0)];
        assert!((spectral_norm(&h, 3, 3).unwrap() - 3.0).abs() < 1e-13);
    }

    #[test]
    fn rectangular_singular_values() {
        let a = vec![c(3.0), c(0.0), c(0.0), c(0.0), c(-2.0), c(0.0)];
        assert_eq!(singular_values(&a, 2, 3).unwrap().len(), 2);
        assert!((spectral_norm(&a, 2, 3).unwrap() - 3.0).abs() < 1e-14);
    }
}
