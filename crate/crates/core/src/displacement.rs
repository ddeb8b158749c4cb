//! Displacement structure of Toeplitz+Hankel matrices.
//!
//! `A = T(φ) + H(ψ)` exactly when `A_{j-1,k} + A_{j+1,k} - A_{j,k-1} - A_{j,k+1} = 0` at every
//! interior position. The pair `(φ, ψ)` is unique only up to a checkerboard matrix
//! `C = T(χ) = H(ψ₂)`; the canonical representative has `ψ → 0` along both parity classes.
//!
//! Parity bookkeeping used throughout: if `ψ₂` equals `τ_odd` on odd indices and `τ_even` on
//! even indices, then `H(ψ₂)` is the checkerboard with value `τ_odd` where `j+k` is even and
//! `τ_even` where `j+k` is odd, and it equals `T(χ)` for `χ = τ_odd` on even lags, `τ_even` on
//! odd lags.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::operators::{FiniteSection, IndexRange, OperatorSpec};
use crate::serde_ext::complex;
use crate::symbol::{DecayClass, FourierSequence};
use crate::{invalid, Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Values of a checkerboard matrix by parity of `j + k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Checkerboard {
    #[serde(with = "complex")]
    pub even: Complex64,
    #[serde(with = "complex")]
    pub odd: Complex64,
}

impl Checkerboard {
    pub fn spec(&self) -> OperatorSpec {
        OperatorSpec::Checkerboard {
            even: self.even,
            odd: self.odd,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.even == ZERO && self.odd == ZERO
    }
}

/// `A = T(φ) + H(ψ)` on `[0, n)²`, with the checkerboard that canonicalization moved from
/// `H` into `T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    /// `φ` on lags `[-(n-1), n-1]`.
    pub toeplitz_part: FourierSequence,
    /// `ψ` on `[1, 2n-1]`.
    pub hankel_part: FourierSequence,
    pub checkerboard: Checkerboard,
    pub canonical: bool,
    /// Largest parity-tail estimator variance seen during canonicalization.
    pub tail_variance: f64,
    /// `max |A - T(φ) - H(ψ)|` over the analyzed window.
    pub residual: f64,
}

impl Decomposition {
    pub fn size(&self) -> usize {
        self.toeplitz_part.len().div_ceil(2)
    }

    pub fn spec(&self) -> OperatorSpec {
        OperatorSpec::Sum(vec![
            OperatorSpec::Toeplitz(self.toeplitz_part.clone()),
            OperatorSpec::Hankel(self.hankel_part.clone()),
        ])
    }

    /// `T(φ) + H(ψ)` on `[0, n)²`.
    pub fn reconstruct(&self) -> Result<FiniteSection> {
        let w = IndexRange::first(self.size());
        self.spec().section(w, w)
    }
}

/// `A = L(â) + L(b̂) J` on a symmetric window `[-m, m)²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoSidedDecomposition {
    /// `â` on lags `[-(2m-1), 2m-1]`.
    pub laurent_symbol: FourierSequence,
    /// `b̂` on `[-(2m-1), 2m-1]`.
    pub flip_symbol: FourierSequence,
    pub checkerboard: Checkerboard,
    pub canonical: bool,
    pub tail_variance: f64,
    pub residual: f64,
}

impl TwoSidedDecomposition {
    pub fn spec(&self) -> OperatorSpec {
        OperatorSpec::Sum(vec![
            OperatorSpec::Laurent(self.laurent_symbol.clone()),
            OperatorSpec::Compose(vec![OperatorSpec::Laurent(self.flip_symbol.clone()), OperatorSpec::Flip]),
        ])
    }

    pub fn parts(&self) -> (&FourierSequence, &FourierSequence) {
        (&self.laurent_symbol, &self.flip_symbol)
    }
}

/// Interior four-term displacement; row and column ranges shrink by one on each side.
pub fn displacement_transform(a: &FiniteSection) -> Result<FiniteSection> {
    let (n, m) = (a.nrows(), a.ncols());
    if n < 3 || m < 3 {
        return invalid(format!("displacement needs at least 3x3, got {n}x{m}"));
    }
    let rows = a.rows().shrink(1).expect("n ≥ 3");
    let cols = a.cols().shrink(1).expect("m ≥ 3");
    let mut out = Vec::with_capacity((n - 2) * (m - 2));
    for r in 1..n - 1 {
        for c in 1..m - 1 {
            out.push(a.at(r - 1, c) + a.at(r + 1, c) - a.at(r, c - 1) - a.at(r, c + 1));
        }
    }
    FiniteSection::new(rows, cols, out)
}

/// `max |D|` of the displacement transform.
pub fn displacement_residual(a: &FiniteSection) -> Result<f64> {
    Ok(displacement_transform(a)?.max_abs())
}

/// Entries constant along diagonals: `A_{j,k} = A_{j+1,k+1}` within `tol`.
pub fn is_toeplitz(a: &FiniteSection, tol: f64) -> bool {
    let (n, m) = (a.nrows(), a.ncols());
    (0..n.saturating_sub(1)).all(|r| (0..m.saturating_sub(1)).all(|c| (a.at(r, c) - a.at(r + 1, c + 1)).norm() <= tol))
}

/// Entries constant along antidiagonals: `A_{j,k} = A_{j-1,k+1}` within `tol`.
pub fn is_hankel(a: &FiniteSection, tol: f64) -> bool {
    let (n, m) = (a.nrows(), a.ncols());
    (1..n).all(|r| (0..m.saturating_sub(1)).all(|c| (a.at(r, c) - a.at(r - 1, c + 1)).norm() <= tol))
}

pub fn is_checkerboard(a: &FiniteSection, tol: f64) -> bool {
    is_toeplitz(a, tol) && is_hankel(a, tol)
}

/// Mean that returns the common value exactly when all inputs agree.
fn stable_mean(v: &[Complex64]) -> Complex64 {
    let base = v[0];
    base + v.iter().map(|x| x - base).sum::<Complex64>() / v.len() as f64
}

/// Variance of the sample mean, `s² / m`.
fn mean_variance(v: &[Complex64], mean: Complex64) -> f64 {
    let m = v.len();
    if m < 2 {
        return 0.0;
    }
    v.iter().map(|x| (x - mean).norm_sqr()).sum::<f64>() / ((m - 1) * m) as f64
}

/// Parity tail estimate: `(τ_odd, τ_even, variance)` from samples of `ψ` at odd and even
/// indices.
fn parity_tails(odd: &[Complex64], even: &[Complex64]) -> (Complex64, Complex64, f64) {
    let to = if odd.is_empty() { ZERO } else { stable_mean(odd) };
    let te = if even.is_empty() { ZERO } else { stable_mean(even) };
    let var = if odd.is_empty() { 0.0 } else { mean_variance(odd, to) }.max(if even.is_empty() {
        0.0
    } else {
        mean_variance(even, te)
    });
    (to, te, var)
}

fn check_displacement(a: &FiniteSection, tol: f64) -> Result<()> {
    let residual = displacement_residual(a)?;
    if !(residual <= tol) {
        return Err(Error::NotToeplitzPlusHankel { residual, tol });
    }
    Ok(())
}

/// One-sided extraction on `[0, n)²`.
///
/// Raw step: `ψ_j = A_{(j-1)/2,(j-1)/2}` for odd `j`, `A_{(j-2)/2, j/2}` for even `j`, then
/// `φ` is read from `A - H(ψ)`; this forces `φ_0 = φ_{-1} = 0`. Canonical step: the parity
/// means of the last `⌈n/4⌉` odd and even entries of raw `ψ` are moved into `φ` when the
/// variance of both means is at most `tol`; otherwise the raw pair is returned with
/// `canonical = false`.
pub fn extract(a: &FiniteSection, tol: f64) -> Result<Decomposition> {
    let n = a.nrows();
    if a.rows() != IndexRange::first(n) || a.cols() != IndexRange::first(n) {
        return invalid(format!("extract needs a section on [0, n)², got {} x {}", a.rows(), a.cols()));
    }
    check_displacement(a, tol)?;

    // psi[i] holds ψ_{i+1}
    let mut psi: Vec<Complex64> = (1..2 * n)
        .map(|j| if j % 2 == 1 { a.at((j - 1) / 2, (j - 1) / 2) } else { a.at((j - 2) / 2, j / 2) })
        .collect();

    let q = n.div_ceil(4);
    let odd: Vec<Complex64> = (0..n).rev().take(q).map(|i| psi[2 * i]).collect();
    let even: Vec<Complex64> = (1..n).rev().take(q).map(|i| psi[2 * i - 1]).collect();
    let (tau_odd, tau_even, variance) = parity_tails(&odd, &even);
    let canonical = variance <= tol;
    let board = if canonical {
        for (i, v) in psi.iter_mut().enumerate() {
            *v -= if i % 2 == 0 { tau_odd } else { tau_even };
        }
        Checkerboard {
            even: tau_odd,
            odd: tau_even,
        }
    } else {
        Checkerboard::default()
    };

    // φ_m from A - H(ψ): row m of column 0 for m ≥ 0, column -m of row 0 for m < 0
    let ni = n as i64;
    let phi: Vec<Complex64> = (-(ni - 1)..ni)
        .map(|m| {
            let (r, c) = if m >= 0 { (m as usize, 0) } else { (0, (-m) as usize) };
            a.at(r, c) - psi[r + c]
        })
        .collect();

    let toeplitz_part = FourierSequence::new(-(ni - 1), phi, DecayClass::Unknown)?;
    let hankel_part = FourierSequence::new(1, psi, DecayClass::Unknown)?;
    let mut dec = Decomposition {
        toeplitz_part,
        hankel_part,
        checkerboard: board,
        canonical,
        tail_variance: variance,
        residual: 0.0,
    };
    dec.residual = a.max_abs_diff(&dec.reconstruct()?)?;
    Ok(dec)
}

/// Two-sided extraction on a flip-invariant window `[-m, m)²` for `A = L(â) + L(b̂) J`.
///
/// Raw `b̂` is read off the main diagonal (odd indices) and the first superdiagonal (even
/// indices), which forces `â_0 = â_{-1} = 0`; `â` is then read from `A - L(b̂)J` along the
/// first row and column. Canonicalization pools the last `⌈m/4⌉` entries of each parity
/// class at both ends of raw `b̂`.
pub fn extract_two_sided(a: &FiniteSection, tol: f64) -> Result<TwoSidedDecomposition> {
    let n = a.nrows();
    let m = (n / 2) as i64;
    if !n.is_multiple_of(2) || n < 4 || a.rows() != IndexRange::symmetric(n / 2) || a.cols() != a.rows() {
        return invalid(format!(
            "extract_two_sided needs a square section on [-m, m)² with m ≥ 2, got {} x {}",
            a.rows(),
            a.cols()
        ));
    }
    check_displacement(a, tol)?;
    let at = |j: i64, k: i64| a.get(j, k).expect("inside window");

    // b[s + 2m - 1] holds b̂_s for s ∈ [-(2m-1), 2m-1]; s = 2i+1 from A_{i,i}, s = 2i+2 from A_{i,i+1}
    let lo = -(2 * m - 1);
    let mut b: Vec<Complex64> = (lo..=2 * m - 1)
        .map(|s| {
            if s.rem_euclid(2) == 1 {
                let i = (s - 1) / 2;
                at(i, i)
            } else {
                let i = (s - 2).div_euclid(2);
                at(i, i + 1)
            }
        })
        .collect();
    let idx = |s: i64| (s - lo) as usize;

    let q = (m as usize).div_ceil(4);
    let mut odd = Vec::new();
    let mut even = Vec::new();
    for t in 0..q as i64 {
        for s in [2 * m - 1 - 2 * t, -(2 * m - 1) + 2 * t] {
            odd.push(b[idx(s)]);
        }
        for s in [2 * m - 2 - 2 * t, -(2 * m - 2) + 2 * t] {
            even.push(b[idx(s)]);
        }
    }
    let (tau_odd, tau_even, variance) = parity_tails(&odd, &even);
    let canonical = variance <= tol;
    let board = if canonical {
        for s in lo..=2 * m - 1 {
            b[idx(s)] -= if s.rem_euclid(2) == 1 { tau_odd } else { tau_even };
        }
        Checkerboard {
            even: tau_odd,
            odd: tau_even,
        }
    } else {
        Checkerboard::default()
    };

    // â_d from (A - L(b̂)J)_{j,k} with j - k = d on the first row or column
    let ahat: Vec<Complex64> = (lo..=2 * m - 1)
        .map(|d| {
            let (j, k) = if d >= 0 { (d - m, -m) } else { (-m, -m - d) };
            at(j, k) - b[idx(j + k + 1)]
        })
        .collect();

    let mut dec = TwoSidedDecomposition {
        laurent_symbol: FourierSequence::new(lo, ahat, DecayClass::Unknown)?,
        flip_symbol: FourierSequence::new(lo, b, DecayClass::Unknown)?,
        checkerboard: board,
        canonical,
        tail_variance: variance,
        residual: 0.0,
    };
    let rebuilt = dec.spec().section(a.rows(), a.cols())?;
    dec.residual = a.max_abs_diff(&rebuilt)?;
    Ok(dec)
}

/// Result of [`cesaro_checkerboard_split`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CesaroSplit {
    /// `φ - c_n` on the reported lags.
    pub remainder: FourierSequence,
    /// `c_n` at the even and the odd lag closest to 0.
    pub checkerboard: Checkerboard,
}

/// Cesàro average over even shifts, `c_n(m) = (1/(2n+1)) Σ_{|j|≤n} φ_{m-2j}`, subtracted
/// from `φ`. Reported lags are those `m` with `m ± 2n` inside the stored window, or the
/// whole window for finitely supported `φ`.
pub fn cesaro_checkerboard_split(phi: &FourierSequence, n: usize) -> Result<CesaroSplit> {
    let n = n as i64;
    let (lo, hi) = if phi.decay_class() == DecayClass::FiniteSupport {
        (phi.lo(), phi.hi())
    } else {
        (phi.lo() + 2 * n, phi.hi() - 2 * n)
    };
    if lo > hi {
        return invalid(format!(
            "window [{}, {}] is too small for n = {n}: need width > {}",
            phi.lo(),
            phi.hi(),
            4 * n
        ));
    }
    if lo > 0 || hi < 0 || (lo > -1 && hi < 1) {
        return invalid(format!("reported lags [{lo}, {hi}] must contain an even and an odd lag near 0"));
    }
    let scale = 1.0 / (2 * n + 1) as f64;
    let avg = |m: i64| -> Result<Complex64> {
        let mut s = ZERO;
        for j in -n..=n {
            s += phi.coeff(m - 2 * j)?;
        }
        Ok(s * scale)
    };
    let values = (lo..=hi).map(|m| Ok(phi.coeff(m)? - avg(m)?)).collect::<Result<Vec<_>>>()?;
    let odd_lag = if hi >= 1 { 1 } else { -1 };
    let class = if phi.decay_class() == DecayClass::FiniteSupport {
        DecayClass::Unknown
    } else {
        phi.decay_class()
    };
    Ok(CesaroSplit {
        remainder: FourierSequence::new(lo, values, class)?,
        checkerboard: Checkerboard {
            even: avg(0)?,
            odd: avg(odd_lag)?,
        },
    })
}
