//! Finite sections of structured operators.
//!
//! Entry conventions (row `j`, column `k`):
//!
//! | spec                | entry                       | indices   |
//! |---------------------|-----------------------------|-----------|
//! | `Toeplitz(φ)`       | `φ_{j-k}`                   | `ℕ₀`      |
//! | `Hankel(ψ)`         | `ψ_{j+k+1}`                 | `ℕ₀`      |
//! | `Laurent(φ)`        | `φ_{j-k}`                   | `ℤ`       |
//! | `Flip`              | `δ_{j,-k-1}`                | `ℤ`       |
//! | `Shift{k: s}`       | `δ_{j,k+s}`                 | `ℤ`       |
//! | `Checkerboard`      | `even` if `j+k` even, else `odd` | `ℤ`  |
//! | `FiniteRank`        | listed entries, zero elsewhere | `ℤ`    |
//!
//! `Compose` multiplies left to right. `Flip` and `Shift` factors at either end are
//! applied exactly by re-indexing the remaining product, so e.g. `L(b)·J` has entries
//! `b_{j+k+1}` on every window. Any other product is formed from truncations, with the
//! inner index range equal to the requested column range; this is the product of
//! sections, which differs from the section of the product near the window edges.

use std::collections::HashMap;
use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use crate::range::IndexRange;
use crate::serde_ext::{complex, complex_vec, Pair};
use crate::symbol::FourierSequence;
use crate::{invalid, Error, Result, SECTION_CAP};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dense complex matrix with explicit row and column index ranges. Row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SectionWire", into = "SectionWire")]
pub struct FiniteSection {
    rows: IndexRange,
    cols: IndexRange,
    entries: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct SectionWire {
    rows: IndexRange,
    cols: IndexRange,
    #[serde(with = "complex_vec")]
    entries: Vec<Complex64>,
}

impl TryFrom<SectionWire> for FiniteSection {
    type Error = Error;
    fn try_from(w: SectionWire) -> Result<Self> {
        FiniteSection::new(w.rows, w.cols, w.entries)
    }
}

impl From<FiniteSection> for SectionWire {
    fn from(s: FiniteSection) -> Self {
        SectionWire {
            rows: s.rows,
            cols: s.cols,
            entries: s.entries,
        }
    }
}

fn check_cap(rows: usize, cols: usize) -> Result<()> {
    if rows > SECTION_CAP || cols > SECTION_CAP {
        return Err(Error::SizeCap {
            rows,
            cols,
            cap: SECTION_CAP,
        });
    }
    Ok(())
}

impl FiniteSection {
    pub fn new(rows: IndexRange, cols: IndexRange, entries: Vec<Complex64>) -> Result<Self> {
        check_cap(rows.len(), cols.len())?;
        if entries.len() != rows.len() * cols.len() {
            return Err(Error::DimensionMismatch {
                expected: rows.len() * cols.len(),
                got: entries.len(),
            });
        }
        if entries.iter().any(|z| !z.is_finite()) {
            return invalid("section has non-finite entries");
        }
        Ok(Self { rows, cols, entries })
    }

    /// Entry `(j, k)` from `f` for absolute indices `j ∈ rows`, `k ∈ cols`.
    pub fn from_fn(rows: IndexRange, cols: IndexRange, f: impl Fn(i64, i64) -> Complex64) -> Result<Self> {
        check_cap(rows.len(), cols.len())?;
        let entries = rows.iter().flat_map(|j| cols.iter().map(move |k| (j, k))).map(|(j, k)| f(j, k)).collect();
        Self::new(rows, cols, entries)
    }

    pub fn zeros(rows: IndexRange, cols: IndexRange) -> Result<Self> {
        Self::from_fn(rows, cols, |_, _| ZERO)
    }

    pub fn identity(range: IndexRange) -> Result<Self> {
        Self::from_fn(range, range, |j, k| if j == k { Complex64::new(1.0, 0.0) } else { ZERO })
    }

    pub fn rows(&self) -> IndexRange {
        self.rows
    }

    pub fn cols(&self) -> IndexRange {
        self.cols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Entry at local position `(r, c)`.
    pub fn at(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r * self.ncols() + c]
    }

    /// Entry at absolute indices, `None` outside the ranges.
    pub fn get(&self, j: i64, k: i64) -> Option<Complex64> {
        if self.rows.contains(j) && self.cols.contains(k) {
            Some(self.at((j - self.rows.lo()) as usize, (k - self.cols.lo()) as usize))
        } else {
            None
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::IncompatibleRanges(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Self::new(self.rows, self.cols, entries)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Self::new(self.rows, self.cols, entries)
    }

    /// `max |self - other|` over entries.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.same_shape(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Conjugate transpose, with row and column ranges swapped.
    pub fn adjoint(&self) -> Self {
        let (n, m) = (self.nrows(), self.ncols());
        let mut entries = vec![ZERO; n * m];
        for r in 0..n {
            for c in 0..m {
                entries[c * n + r] = self.entries[r * m + c].conj();
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    /// Matrix product; `self.cols` must equal `other.rows`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::IncompatibleRanges(format!(
                "inner ranges {} and {} differ",
                self.cols, other.rows
            )));
        }
        let (n, k, m) = (self.nrows(), self.ncols(), other.ncols());
        let mut entries = vec![ZERO; n * m];
        for r in 0..n {
            let out = &mut entries[r * m..(r + 1) * m];
            for i in 0..k {
                let a = self.entries[r * k + i];
                if a == ZERO {
                    continue;
                }
                for (o, b) in out.iter_mut().zip(&other.entries[i * m..(i + 1) * m]) {
                    *o += a * b;
                }
            }
        }
        Self::new(self.rows, other.cols, entries)
    }

    /// Writes `row,col,re,im` lines (absolute indices) with a header.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::InvalidInput(format!("csv export failed: {e}"));
        out.write_record(["row", "col", "re", "im"]).map_err(io)?;
        for (r, j) in self.rows.iter().enumerate() {
            for (c, k) in self.cols.iter().enumerate() {
                let z = self.at(r, c);
                out.serialize((j, k, z.re, z.im)).map_err(io)?;
            }
        }
        out.flush()
            .map_err(|e| Error::InvalidInput(format!("csv export failed: {e}")))
    }

    /// Binary dump: `i64` row offset, `i64` column offset, `i64` row count, `i64` column
    /// count, then `re, im` as little-endian `f64` pairs in row-major order.
    pub fn write_binary<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for v in [
            self.rows.lo(),
            self.cols.lo(),
            self.nrows() as i64,
            self.ncols() as i64,
        ] {
            w.write_all(&v.to_le_bytes())?;
        }
        for z in &self.entries {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
        Ok(())
    }

    /// Inverse of [`write_binary`](Self::write_binary).
    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let io = |e: std::io::Error| Error::InvalidInput(format!("binary read failed: {e}"));
        let mut word = [0u8; 8];
        let mut header = [0i64; 4];
        for h in &mut header {
            r.read_exact(&mut word).map_err(io)?;
            *h = i64::from_le_bytes(word);
        }
        let [row_lo, col_lo, nrows, ncols] = header;
        if nrows <= 0 || ncols <= 0 {
            return invalid("binary dump has empty dimensions");
        }
        let rows = IndexRange::new(row_lo, row_lo + nrows - 1)?;
        let cols = IndexRange::new(col_lo, col_lo + ncols - 1)?;
        check_cap(rows.len(), cols.len())?;
        let mut entries = Vec::with_capacity(rows.len() * cols.len());
        for _ in 0..rows.len() * cols.len() {
            r.read_exact(&mut word).map_err(io)?;
            let re = f64::from_le_bytes(word);
            r.read_exact(&mut word).map_err(io)?;
            let im = f64::from_le_bytes(word);
            entries.push(Complex64::new(re, im));
        }
        Self::new(rows, cols, entries)
    }
}

/// Standard matrix-vector product; `x` is indexed by the column range.
pub fn apply(section: &FiniteSection, x: &[Complex64]) -> Result<Vec<Complex64>> {
    if x.len() != section.ncols() {
        return Err(Error::DimensionMismatch {
            expected: section.ncols(),
            got: x.len(),
        });
    }
    let m = section.ncols();
    Ok(section
        .entries
        .chunks_exact(m)
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect())
}

/// One listed entry of a finite-rank operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub row: i64,
    pub col: i64,
    #[serde(with = "complex")]
    pub value: Complex64,
}

/// Structured operator description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecWire", into = "SpecWire")]
pub enum OperatorSpec {
    Toeplitz(FourierSequence),
    /// `ψ` is indexed from 1: `ψ_1` sits at `(0, 0)`.
    Hankel(FourierSequence),
    Laurent(FourierSequence),
    Flip,
    Shift { k: i64 },
    Checkerboard { even: Complex64, odd: Complex64 },
    FiniteRank(Vec<Entry>),
    Sum(Vec<OperatorSpec>),
    Compose(Vec<OperatorSpec>),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum SpecWire {
    Toeplitz {
        symbol: FourierSequence,
    },
    Hankel {
        symbol: FourierSequence,
    },
    Laurent {
        symbol: FourierSequence,
    },
    Flip,
    Shift {
        k: i64,
    },
    Checkerboard {
        even: Pair,
        odd: Pair,
    },
    FiniteRank {
        entries: Vec<Entry>,
    },
    Sum {
        terms: Vec<OperatorSpec>,
    },
    Compose {
        factors: Vec<OperatorSpec>,
    },
}

impl TryFrom<SpecWire> for OperatorSpec {
    type Error = Error;
    fn try_from(w: SpecWire) -> Result<Self> {
        let spec = match w {
            SpecWire::Toeplitz { symbol } => OperatorSpec::Toeplitz(symbol),
            SpecWire::Hankel { symbol } => OperatorSpec::Hankel(symbol),
            SpecWire::Laurent { symbol } => OperatorSpec::Laurent(symbol),
            SpecWire::Flip => OperatorSpec::Flip,
            SpecWire::Shift { k } => OperatorSpec::Shift { k },
            SpecWire::Checkerboard { even, odd } => OperatorSpec::Checkerboard {
                even: even.0,
                odd: odd.0,
            },
            SpecWire::FiniteRank { entries } => OperatorSpec::FiniteRank(entries),
            SpecWire::Sum { terms } => OperatorSpec::Sum(terms),
            SpecWire::Compose { factors } => OperatorSpec::Compose(factors),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<OperatorSpec> for SpecWire {
    fn from(s: OperatorSpec) -> Self {
        match s {
            OperatorSpec::Toeplitz(symbol) => SpecWire::Toeplitz { symbol },
            OperatorSpec::Hankel(symbol) => SpecWire::Hankel { symbol },
            OperatorSpec::Laurent(symbol) => SpecWire::Laurent { symbol },
            OperatorSpec::Flip => SpecWire::Flip,
            OperatorSpec::Shift { k } => SpecWire::Shift { k },
            OperatorSpec::Checkerboard { even, odd } => SpecWire::Checkerboard {
                even: Pair(even),
                odd: Pair(odd),
            },
            OperatorSpec::FiniteRank(entries) => SpecWire::FiniteRank { entries },
            OperatorSpec::Sum(terms) => SpecWire::Sum { terms },
            OperatorSpec::Compose(factors) => SpecWire::Compose { factors },
        }
    }
}

/// Index list for one axis; `None` marks a row or column that is identically zero.
type Axis = Vec<Option<i64>>;

fn axis(r: IndexRange) -> Axis {
    r.iter().map(Some).collect()
}

impl OperatorSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            OperatorSpec::Sum(v) | OperatorSpec::Compose(v) => {
                if v.is_empty() {
                    return invalid("Sum and Compose need at least one operand");
                }
                v.iter().try_for_each(OperatorSpec::validate)
            }
            OperatorSpec::FiniteRank(e) => {
                if e.iter().any(|x| !x.value.is_finite()) {
                    return invalid("finite-rank entry is not finite");
                }
                Ok(())
            }
            OperatorSpec::Checkerboard { even, odd } if !(even.is_finite() && odd.is_finite()) => {
                invalid("checkerboard values must be finite")
            }
            _ => Ok(()),
        }
    }

    /// Whether the operator lives on `ℓ^p(ℕ₀)` (contains a Toeplitz or Hankel term).
    pub fn is_half_line(&self) -> bool {
        match self {
            OperatorSpec::Toeplitz(_) | OperatorSpec::Hankel(_) => true,
            OperatorSpec::Sum(v) | OperatorSpec::Compose(v) => v.iter().any(OperatorSpec::is_half_line),
            _ => false,
        }
    }

    /// Dense section on `rows × cols`.
    pub fn section(&self, rows: IndexRange, cols: IndexRange) -> Result<FiniteSection> {
        check_cap(rows.len(), cols.len())?;
        self.validate()?;
        if self.is_half_line() && (rows.lo() < 0 || cols.lo() < 0) {
            return invalid(format!(
                "operator on ℓ^p(ℕ₀) needs nonnegative ranges, got {rows} x {cols}"
            ));
        }
        let entries = self.fill(&axis(rows), &axis(cols))?;
        FiniteSection::new(rows, cols, entries)
    }

    /// Section of `V^{-n} P* A P V^n` on `window × window`: entry `(j, k)` is
    /// `A_{j+n, k+n}`, or zero when `j+n` or `k+n` is negative.
    pub fn shifted_compression(&self, n: usize, window: IndexRange) -> Result<FiniteSection> {
        check_cap(window.len(), window.len())?;
        let shift = |j: i64| {
            let i = j + n as i64;
            (i >= 0).then_some(i)
        };
        let ax: Axis = window.iter().map(shift).collect();
        let entries = self.fill(&ax, &ax)?;
        FiniteSection::new(window, window, entries)
    }

    /// Row-major entries on the given axes. Indices outside `ℕ₀` of half-line operators
    /// are zero rows or columns.
    fn fill(&self, rows: &Axis, cols: &Axis) -> Result<Vec<Complex64>> {
        let half = self.is_half_line();
        let clip = |a: &Axis| -> Axis { a.iter().map(|i| i.filter(|&v| !half || v >= 0)).collect() };
        let (rows, cols) = (clip(rows), clip(cols));
        let (n, m) = (rows.len(), cols.len());
        let mut out = vec![ZERO; n * m];
        match self {
            OperatorSpec::Toeplitz(s) | OperatorSpec::Laurent(s) => {
                fill_entries(&mut out, &rows, &cols, |j, k| s.coeff(j - k))?
            }
            OperatorSpec::Hankel(s) => fill_entries(&mut out, &rows, &cols, |j, k| s.coeff(j + k + 1))?,
            OperatorSpec::Flip => {
                fill_entries(&mut out, &rows, &cols, |j, k| Ok(if j == -k - 1 { ONE } else { ZERO }))?
            }
            OperatorSpec::Shift { k: s } => {
                fill_entries(&mut out, &rows, &cols, |j, k| Ok(if j == k + s { ONE } else { ZERO }))?
            }
            OperatorSpec::Checkerboard { even, odd } => fill_entries(&mut out, &rows, &cols, |j, k| {
                Ok(if (j + k).rem_euclid(2) == 0 { *even } else { *odd })
            })?,
            OperatorSpec::FiniteRank(list) => {
                let mut map: HashMap<(i64, i64), Complex64> = HashMap::new();
                for e in list {
                    *map.entry((e.row, e.col)).or_insert(ZERO) += e.value;
                }
                fill_entries(&mut out, &rows, &cols, |j, k| Ok(map.get(&(j, k)).copied().unwrap_or(ZERO)))?
            }
            OperatorSpec::Sum(terms) => {
                for t in terms {
                    for (o, v) in out.iter_mut().zip(t.fill(&rows, &cols)?) {
                        *o += v;
                    }
                }
            }
            OperatorSpec::Compose(factors) => return compose(factors, &rows, &cols),
        }
        Ok(out)
    }
}

const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn fill_entries(
    out: &mut [Complex64],
    rows: &Axis,
    cols: &Axis,
    f: impl Fn(i64, i64) -> Result<Complex64>,
) -> Result<()> {
    let m = cols.len();
    for (r, j) in rows.iter().enumerate() {
        let Some(j) = *j else { continue };
        for (c, k) in cols.iter().enumerate() {
            if let Some(k) = *k {
                out[r * m + c] = f(j, k)?;
            }
        }
    }
    Ok(())
}

fn compose(factors: &[OperatorSpec], rows: &Axis, cols: &Axis) -> Result<Vec<Complex64>> {
    match factors {
        [] => unreachable!("validated nonempty"),
        [single] => single.fill(rows, cols),
        [rest @ .., OperatorSpec::Flip] => {
            // (X J)_{j,k} = X_{j,-k-1}
            let mapped: Axis = cols.iter().map(|k| k.map(|k| -k - 1)).collect();
            compose(rest, rows, &mapped)
        }
        [rest @ .., OperatorSpec::Shift { k: s }] => {
            // (X V^s)_{j,k} = X_{j,k+s}
            let mapped: Axis = cols.iter().map(|k| k.map(|k| k + s)).collect();
            compose(rest, rows, &mapped)
        }
        [OperatorSpec::Flip, rest @ ..] => {
            // (J X)_{j,k} = X_{-j-1,k}
            let mapped: Axis = rows.iter().map(|j| j.map(|j| -j - 1)).collect();
            compose(rest, &mapped, cols)
        }
        [OperatorSpec::Shift { k: s }, rest @ ..] => {
            // (V^s X)_{j,k} = X_{j-s,k}
            let mapped: Axis = rows.iter().map(|j| j.map(|j| j - s)).collect();
            compose(rest, &mapped, cols)
        }
        [first, rest @ ..] => {
            let left = first.fill(rows, cols)?;
            let right = compose(rest, cols, cols)?;
            let (n, m) = (rows.len(), cols.len());
            let mut out = vec![ZERO; n * m];
            for r in 0..n {
                for i in 0..m {
                    let a = left[r * m + i];
                    if a == ZERO {
                        continue;
                    }
                    for c in 0..m {
                        out[r * m + c] += a * right[i * m + c];
                    }
                }
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::DecayClass;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn z_plus_zinv() -> FourierSequence {
        FourierSequence::trig_poly(-1, vec![c(1.0), c(0.0), c(1.0)]).unwrap()
    }

    fn harmonic(hi: i64) -> FourierSequence {
        FourierSequence::from_fn(1, hi, DecayClass::C0, |j| c(1.0 / j as f64))
    }

    fn real_rows(s: &FiniteSection) -> Vec<Vec<f64>> {
        (0..s.nrows()).map(|r| (0..s.ncols()).map(|k| s.at(r, k).re).collect()).collect()
    }

    #[test]
    fn toeplitz_tridiagonal() {
        let s = OperatorSpec::Toeplitz(z_plus_zinv())
            .section(IndexRange::first(3), IndexRange::first(3))
            .unwrap();
        assert_eq!(real_rows(&s), vec![vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]]);
    }

    #[test]
    fn hilbert_section() {
        let s = OperatorSpec::Hankel(harmonic(10))
            .section(IndexRange::first(2), IndexRange::first(2))
            .unwrap();
        assert_eq!(real_rows(&s), vec![vec![1.0, 0.5], vec![0.5, 1.0 / 3.0]]);
    }

    #[test]
    fn checkerboard_pattern() {
        let s = OperatorSpec::Checkerboard { even: c(1.0), odd: c(0.0) }
            .section(IndexRange::first(4), IndexRange::first(4))
            .unwrap();
        for r in 0..4 {
            for k in 0..4 {
                assert_eq!(s.at(r, k).re, if (r + k) % 2 == 0 { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn missing_coefficients_are_errors() {
        let err = OperatorSpec::Hankel(harmonic(4)).section(IndexRange::first(3), IndexRange::first(3));
        assert!(matches!(err, Err(Error::MissingCoefficient { index: 5, .. })));
        let neg = OperatorSpec::Toeplitz(z_plus_zinv()).section(IndexRange::new(-1, 1).unwrap(), IndexRange::first(2));
        assert!(neg.is_err());
    }

    #[test]
    fn shifted_compressions() {
        let t = OperatorSpec::Toeplitz(z_plus_zinv());
        let w = IndexRange::first(5);
        assert_eq!(t.shifted_compression(7, w).unwrap(), t.section(w, w).unwrap());

        let h = OperatorSpec::Hankel(harmonic(300));
        let s = h.shifted_compression(100, IndexRange::first(4)).unwrap();
        for r in 0..4 {
            for k in 0..4 {
                assert_eq!(s.at(r, k).re, 1.0 / (r + k + 201) as f64);
            }
        }
        assert!(s.max_abs() <= 1.0 / 201.0);

        let k = OperatorSpec::FiniteRank(vec![Entry { row: 0, col: 0, value: c(5.0) }]);
        assert_eq!(k.shifted_compression(1, IndexRange::first(3)).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn apply_examples() {
        let id = FiniteSection::identity(IndexRange::first(3)).unwrap();
        let x = vec![c(1.0), Complex64::new(0.0, 2.0), c(-3.0)];
        assert_eq!(apply(&id, &x).unwrap(), x);
        let t = OperatorSpec::Toeplitz(z_plus_zinv())
            .section(IndexRange::first(3), IndexRange::first(3))
            .unwrap();
        assert_eq!(apply(&t, &[c(1.0), c(0.0), c(0.0)]).unwrap(), vec![c(0.0), c(1.0), c(0.0)]);
        let h = OperatorSpec::Hankel(harmonic(4))
            .section(IndexRange::first(2), IndexRange::first(2))
            .unwrap();
        // oracle: (1 + 1/2, 1/2 + 1/3)
        let y = apply(&h, &[c(1.0), c(1.0)]).unwrap();
        assert!((y[0].re - 1.5).abs() < 1e-15 && (y[1].re - 5.0 / 6.0).abs() < 1e-15);
        assert!(matches!(apply(&h, &[c(1.0)]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn flip_squares_to_identity() {
        let w = IndexRange::symmetric(5);
        let j2 = OperatorSpec::Compose(vec![OperatorSpec::Flip, OperatorSpec::Flip])
            .section(w, w)
            .unwrap();
        assert_eq!(j2, FiniteSection::identity(w).unwrap());
        let j = OperatorSpec::Flip.section(w, w).unwrap();
        assert_eq!(j.matmul(&j).unwrap(), FiniteSection::identity(w).unwrap());
    }

    #[test]
    fn laurent_times_flip_is_hankel_like() {
        let b = FourierSequence::trig_poly(-3, (0..7).map(|i| c(i as f64 + 1.0)).collect()).unwrap();
        let w = IndexRange::symmetric(4);
        let s = OperatorSpec::Compose(vec![OperatorSpec::Laurent(b.clone()), OperatorSpec::Flip])
            .section(w, w)
            .unwrap();
        for j in w.iter() {
            for k in w.iter() {
                assert_eq!(s.get(j, k).unwrap(), b.coeff(j + k + 1).unwrap());
            }
        }
    }

    #[test]
    fn shift_composition() {
        let w = IndexRange::symmetric(4);
        let v2 = OperatorSpec::Shift { k: 2 }.section(w, w).unwrap();
        let v11 = OperatorSpec::Compose(vec![OperatorSpec::Shift { k: 1 }, OperatorSpec::Shift { k: 1 }])
            .section(w, w)
            .unwrap();
        assert_eq!(v2, v11);
        assert_eq!(v2.get(2, 0), Some(c(1.0)));
    }

    #[test]
    fn general_compose_is_product_of_sections() {
        let a = OperatorSpec::Laurent(z_plus_zinv());
        let w = IndexRange::symmetric(3);
        let sq = OperatorSpec::Compose(vec![a.clone(), a.clone()]).section(w, w).unwrap();
        let s = a.section(w, w).unwrap();
        assert_eq!(sq, s.matmul(&s).unwrap());
    }

    #[test]
    fn csv_and_binary_roundtrip() {
        let s = OperatorSpec::Hankel(harmonic(10))
            .section(IndexRange::first(2), IndexRange::new(1, 3).unwrap())
            .unwrap();
        let mut buf = Vec::new();
        s.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 32 + 16 * 6);
        assert_eq!(FiniteSection::read_binary(&buf[..]).unwrap(), s);
        let mut text = Vec::new();
        s.write_csv(&mut text).unwrap();
        let text = String::from_utf8(text).unwrap();
        assert!(text.starts_with("row,col,re,im\n0,1,0.5,0.0\n"));
        assert_eq!(text.lines().count(), 7);
    }

    #[test]
    fn json_roundtrip() {
        let spec = OperatorSpec::Sum(vec![
            OperatorSpec::Toeplitz(z_plus_zinv()),
            OperatorSpec::Compose(vec![OperatorSpec::Laurent(z_plus_zinv()), OperatorSpec::Flip]),
            OperatorSpec::Checkerboard { even: c(1.0), odd: c(-1.0) },
            OperatorSpec::FiniteRank(vec![Entry { row: 0, col: 1, value: c(2.0) }]),
        ]);
        let j = serde_json::to_value(&spec).unwrap();
        assert_eq!(j["type"], "sum");
        assert_eq!(j["terms"][1]["factors"][1]["type"], "flip");
        let back: OperatorSpec = serde_json::from_value(j).unwrap();
        assert_eq!(back, spec);
        assert!(serde_json::from_value::<OperatorSpec>(serde_json::json!({"type": "sum", "terms": []})).is_err());
    }
}
