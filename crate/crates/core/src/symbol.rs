//! Symbols on the unit circle and their coefficient sequences.
//!
//! Fourier convention: `â_j = (1/2π) ∫ a(e^{iθ}) e^{-ijθ} dθ`, approximated on the grid
//! `θ_m = 2πm/N`. Piecewise symbols are never sampled at a jump; a grid point that
//! coincides with an arc boundary receives the mean of the two one-sided limits.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::fft;
use crate::norms::{matrix_pnorm, PNormRequest};
use crate::operators::OperatorSpec;
use crate::range::IndexRange;
use crate::serde_ext::{complex, complex_vec, extended_real};
use crate::{invalid, Error, Result};

const BOUNDARY_EPS: f64 = 1e-12;

/// How fast a two-sided sequence is known to decay. Controls whether coefficients
/// outside the stored window may be read as zero and which norms are defined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayClass {
    FiniteSupport,
    Summable,
    C0,
    Bounded,
    #[default]
    Unknown,
}

impl DecayClass {
    pub fn is_summable(self) -> bool {
        matches!(self, DecayClass::FiniteSupport | DecayClass::Summable)
    }

    pub fn is_c0(self) -> bool {
        matches!(
            self,
            DecayClass::FiniteSupport | DecayClass::Summable | DecayClass::C0
        )
    }
}

impl fmt::Display for DecayClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DecayClass::FiniteSupport => "finite_support",
            DecayClass::Summable => "summable",
            DecayClass::C0 => "c0",
            DecayClass::Bounded => "bounded",
            DecayClass::Unknown => "unknown",
        };
        f.write_str(s)
    }
}

/// A two-sided complex sequence stored on the window `[lo, lo + len - 1]`.
///
/// For [`DecayClass::FiniteSupport`] every index outside the window is exactly zero;
/// for any other class reading outside the window is an error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SequenceWire", into = "SequenceWire")]
pub struct FourierSequence {
    lo: i64,
    values: Vec<Complex64>,
    decay_class: DecayClass,
}

#[derive(Serialize, Deserialize)]
struct SequenceWire {
    lo: i64,
    #[serde(with = "complex_vec")]
    values: Vec<Complex64>,
    #[serde(default)]
    decay_class: DecayClass,
}

impl TryFrom<SequenceWire> for FourierSequence {
    type Error = Error;
    fn try_from(w: SequenceWire) -> Result<Self> {
        FourierSequence::new(w.lo, w.values, w.decay_class)
    }
}

impl From<FourierSequence> for SequenceWire {
    fn from(s: FourierSequence) -> Self {
        SequenceWire {
            lo: s.lo,
            values: s.values,
            decay_class: s.decay_class,
        }
    }
}

impl FourierSequence {
    pub fn new(lo: i64, values: Vec<Complex64>, decay_class: DecayClass) -> Result<Self> {
        if values.is_empty() {
            return invalid("sequence window is empty");
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return invalid(format!("sequence value at index {} is not finite", lo + i as i64));
        }
        Ok(Self {
            lo,
            values,
            decay_class,
        })
    }

    /// Finitely supported sequence (trigonometric polynomial coefficients).
    pub fn trig_poly(lo: i64, values: Vec<Complex64>) -> Result<Self> {
        Self::new(lo, values, DecayClass::FiniteSupport)
    }

    /// Fills `[lo, hi]` from `f`.
    ///
    /// # Panics
    /// If `lo > hi` or `f` returns a non-finite value.
    pub fn from_fn(lo: i64, hi: i64, decay_class: DecayClass, f: impl Fn(i64) -> Complex64) -> Self {
        assert!(lo <= hi, "empty window [{lo}, {hi}]");
        Self::new(lo, (lo..=hi).map(f).collect(), decay_class)
            .expect("from_fn produced a non-finite value")
    }

    /// `ψ_j = j^{-power}` on `[1, hi]`, decay class `c0`.
    pub fn power_decay(hi: i64, power: i32) -> Self {
        Self::from_fn(1, hi, DecayClass::C0, |j| Complex64::new((j as f64).powi(-power), 0.0))
    }

    pub fn zeros(lo: i64, hi: i64) -> Self {
        Self::from_fn(lo, hi, DecayClass::FiniteSupport, |_| Complex64::new(0.0, 0.0))
    }

    /// The unit sequence `e_index`.
    pub fn unit(index: i64) -> Self {
        Self::from_fn(index, index, DecayClass::FiniteSupport, |_| Complex64::new(1.0, 0.0))
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.values.len() as i64 - 1
    }

    pub fn window(&self) -> IndexRange {
        IndexRange::new(self.lo, self.hi()).expect("non-empty by construction")
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn decay_class(&self) -> DecayClass {
        self.decay_class
    }

    pub fn with_decay_class(mut self, class: DecayClass) -> Self {
        self.decay_class = class;
        self
    }

    /// Stored value, `None` outside the window.
    pub fn get(&self, j: i64) -> Option<Complex64> {
        if j < self.lo || j > self.hi() {
            None
        } else {
            Some(self.values[(j - self.lo) as usize])
        }
    }

    /// Coefficient at `j`; zero outside the window for finitely supported sequences,
    /// an error otherwise.
    pub fn coeff(&self, j: i64) -> Result<Complex64> {
        match self.get(j) {
            Some(v) => Ok(v),
            None if self.decay_class == DecayClass::FiniteSupport => Ok(Complex64::new(0.0, 0.0)),
            None => Err(Error::MissingCoefficient {
                index: j,
                lo: self.lo,
                hi: self.hi(),
            }),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, v)| (self.lo + i as i64, *v))
    }

    /// Smallest window containing every nonzero value.
    pub fn support(&self) -> Option<(i64, i64)> {
        let first = self.values.iter().position(|v| *v != Complex64::new(0.0, 0.0))?;
        let last = self.values.iter().rposition(|v| *v != Complex64::new(0.0, 0.0))?;
        Some((self.lo + first as i64, self.lo + last as i64))
    }

    /// Index shift, i.e. the coefficients of `χ_k · a`.
    pub fn shifted(&self, k: i64) -> Self {
        Self {
            lo: self.lo + k,
            values: self.values.clone(),
            decay_class: self.decay_class,
        }
    }

    /// Re-windows the sequence onto `window` through [`coeff`](Self::coeff).
    pub fn restrict(&self, window: IndexRange) -> Result<Self> {
        let values = window.iter().map(|j| self.coeff(j)).collect::<Result<Vec<_>>>()?;
        let class = match self.decay_class {
            DecayClass::FiniteSupport => match self.support() {
                Some((s, e)) if window.lo() <= s && e <= window.hi() => DecayClass::FiniteSupport,
                None => DecayClass::FiniteSupport,
                Some(_) => DecayClass::Summable,
            },
            c => c,
        };
        Self::new(window.lo(), values, class)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `Σ_j c_j e^{ijθ}` over the stored window.
    pub fn eval_trig(&self, theta: f64) -> Complex64 {
        self.iter()
            .map(|(j, c)| c * Complex64::from_polar(1.0, j as f64 * theta))
            .sum()
    }
}

/// Closed-form expressions allowed on the arcs of a piecewise symbol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ClosedForm {
    Constant {
        #[serde(with = "complex")]
        value: Complex64,
    },
    /// `scale · e^{ikθ}`
    #[serde(rename = "exp_i_k_theta")]
    ExpIK {
        k: i64,
        #[serde(with = "complex", default = "unit_scale")]
        scale: Complex64,
    },
    /// `amplitude · sin(freq·θ + phase)`
    Sin {
        #[serde(with = "complex")]
        amplitude: Complex64,
        freq: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `amplitude · cos(freq·θ + phase)`
    Cos {
        #[serde(with = "complex")]
        amplitude: Complex64,
        freq: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `intercept + slope·θ`
    Affine {
        #[serde(with = "complex")]
        intercept: Complex64,
        #[serde(with = "complex")]
        slope: Complex64,
    },
}

fn unit_scale() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

impl ClosedForm {
    pub fn eval(&self, theta: f64) -> Complex64 {
        match *self {
            ClosedForm::Constant { value } => value,
            ClosedForm::ExpIK { k, scale } => scale * Complex64::from_polar(1.0, k as f64 * theta),
            ClosedForm::Sin {
                amplitude,
                freq,
                phase,
            } => amplitude * (freq * theta + phase).sin(),
            ClosedForm::Cos {
                amplitude,
                freq,
                phase,
            } => amplitude * (freq * theta + phase).cos(),
            ClosedForm::Affine { intercept, slope } => intercept + slope * theta,
        }
    }

    fn is_finite(&self) -> bool {
        match *self {
            ClosedForm::Constant { value } => value.is_finite(),
            ClosedForm::ExpIK { scale, .. } => scale.is_finite(),
            ClosedForm::Sin {
                amplitude,
                freq,
                phase,
            }
            | ClosedForm::Cos {
                amplitude,
                freq,
                phase,
            } => amplitude.is_finite() && freq.is_finite() && phase.is_finite(),
            ClosedForm::Affine { intercept, slope } => intercept.is_finite() && slope.is_finite(),
        }
    }

    /// Exact `max |f|` over the closed interval `[start, end]`.
    fn sup_on(&self, start: f64, end: f64) -> f64 {
        let at_ends = self.eval(start).norm().max(self.eval(end).norm());
        match *self {
            ClosedForm::Constant { value } => value.norm(),
            ClosedForm::ExpIK { scale, .. } => scale.norm(),
            ClosedForm::Affine { .. } => at_ends, // |α + βθ| is convex in θ
            ClosedForm::Sin {
                amplitude,
                freq,
                phase,
            } => {
                if hits_critical(freq * start + phase, freq * end + phase, PI / 2.0) {
                    amplitude.norm()
                } else {
                    at_ends
                }
            }
            ClosedForm::Cos {
                amplitude,
                freq,
                phase,
            } => {
                if hits_critical(freq * start + phase, freq * end + phase, 0.0) {
                    amplitude.norm()
                } else {
                    at_ends
                }
            }
        }
    }
}

/// Whether `[min(u0,u1), max(u0,u1)]` contains a point `offset + kπ`.
fn hits_critical(u0: f64, u1: f64, offset: f64) -> bool {
    let (a, b) = if u0 <= u1 { (u0, u1) } else { (u1, u0) };
    ((a - offset) / PI).ceil() <= ((b - offset) / PI).floor()
}

/// One arc `(start, end]` of a piecewise symbol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub start: f64,
    pub end: f64,
    pub expr: ClosedForm,
}

/// A function on the unit circle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SymbolWire", into = "SymbolWire")]
pub enum SymbolSpec {
    /// Trigonometric (Laurent) polynomial, or any sequence read as one.
    FourierPoly { coeffs: FourierSequence },
    /// Arcs partitioning `(-π, π]`.
    Piecewise { arcs: Vec<Arc> },
    /// Values on the uniform grid `θ_m = 2πm/N`, `N` a power of two; evaluation between
    /// grid points uses the nearest sample.
    Sampled { values: Vec<Complex64> },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum SymbolWire {
    FourierPoly {
        coeffs: FourierSequence,
    },
    Piecewise {
        arcs: Vec<Arc>,
    },
    Sampled {
        #[serde(with = "complex_vec")]
        values: Vec<Complex64>,
    },
}

impl TryFrom<SymbolWire> for SymbolSpec {
    type Error = Error;
    fn try_from(w: SymbolWire) -> Result<Self> {
        let spec = match w {
            // a polynomial vanishes off its window unless the class says otherwise
            SymbolWire::FourierPoly { coeffs } if coeffs.decay_class == DecayClass::Unknown => SymbolSpec::FourierPoly {
                coeffs: coeffs.with_decay_class(DecayClass::FiniteSupport),
            },
            SymbolWire::FourierPoly { coeffs } => SymbolSpec::FourierPoly { coeffs },
            SymbolWire::Piecewise { arcs } => SymbolSpec::Piecewise { arcs },
            SymbolWire::Sampled { values } => SymbolSpec::Sampled { values },
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<SymbolSpec> for SymbolWire {
    fn from(s: SymbolSpec) -> Self {
        match s {
            SymbolSpec::FourierPoly { coeffs } => SymbolWire::FourierPoly { coeffs },
            SymbolSpec::Piecewise { arcs } => SymbolWire::Piecewise { arcs },
            SymbolSpec::Sampled { values } => SymbolWire::Sampled { values },
        }
    }
}

/// Extra information about a coefficient computation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureReport {
    /// Number of grid points actually used; zero when coefficients were read off exactly.
    pub grid_size: usize,
    pub has_jumps: bool,
    /// `max |ĉ_j(N) - ĉ_j(N/2)|` over the window, when the half grid passes the aliasing guard.
    pub error_estimate: Option<f64>,
}

impl SymbolSpec {
    pub fn fourier_poly(coeffs: FourierSequence) -> Self {
        SymbolSpec::FourierPoly { coeffs }
    }

    pub fn constant(c: Complex64) -> Self {
        SymbolSpec::FourierPoly {
            coeffs: FourierSequence::trig_poly(0, vec![c]).expect("finite constant"),
        }
    }

    /// `χ_k(z) = z^k`.
    pub fn monomial(k: i64) -> Self {
        SymbolSpec::FourierPoly {
            coeffs: FourierSequence::unit(k),
        }
    }

    /// `a(e^{it}) = sin(π/p) ± i cos(π/p)` for `±t ∈ (0, π)`: unimodular, with a jump at
    /// `t = 0` and `t = π`. Its Toeplitz operator has essential norm `c_p` on `H^p`.
    pub fn sharpness(p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return invalid(format!("sharpness symbol needs 1 < p < ∞, got {p}"));
        }
        let s = (PI / p).sin();
        let c = (PI / p).cos();
        Ok(SymbolSpec::Piecewise {
            arcs: vec![
                Arc {
                    start: -PI,
                    end: 0.0,
                    expr: ClosedForm::Constant {
                        value: Complex64::new(s, -c),
                    },
                },
                Arc {
                    start: 0.0,
                    end: PI,
                    expr: ClosedForm::Constant {
                        value: Complex64::new(s, c),
                    },
                },
            ],
        })
    }

    pub fn piecewise(arcs: Vec<Arc>) -> Result<Self> {
        let s = SymbolSpec::Piecewise { arcs };
        s.validate()?;
        Ok(s)
    }

    pub fn sampled(values: Vec<Complex64>) -> Result<Self> {
        let s = SymbolSpec::Sampled { values };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SymbolSpec::FourierPoly { .. } => Ok(()),
            SymbolSpec::Sampled { values } => {
                if values.len() < 4 || !values.len().is_power_of_two() {
                    return invalid(format!(
                        "sampled symbol needs a power-of-two number of values ≥ 4, got {}",
                        values.len()
                    ));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return invalid("sampled symbol has non-finite values");
                }
                Ok(())
            }
            SymbolSpec::Piecewise { arcs } => {
                let (Some(first), Some(last)) = (arcs.first(), arcs.last()) else {
                    return invalid("piecewise symbol has no arcs");
                };
                if (first.start + PI).abs() > BOUNDARY_EPS || (last.end - PI).abs() > BOUNDARY_EPS {
                    return invalid("arcs must partition (-π, π]");
                }
                for (i, arc) in arcs.iter().enumerate() {
                    if !(arc.end > arc.start) {
                        return invalid(format!("arc {i} has non-positive length"));
                    }
                    if !arc.expr.is_finite() {
                        return invalid(format!("arc {i} has non-finite parameters"));
                    }
                    if let Some(next) = arcs.get(i + 1) {
                        if (next.start - arc.end).abs() > BOUNDARY_EPS {
                            return invalid(format!("arcs {i} and {} overlap or leave a gap", i + 1));
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// Value at angle `θ` (any real). Piecewise arcs are `(start, end]`.
    pub fn eval(&self, theta: f64) -> Complex64 {
        match self {
            SymbolSpec::FourierPoly { coeffs } => coeffs.eval_trig(theta),
            SymbolSpec::Piecewise { arcs } => {
                let t = wrap_angle(theta);
                let arc = arcs
                    .iter()
                    .find(|a| t <= a.end)
                    .unwrap_or_else(|| arcs.last().expect("validated"));
                arc.expr.eval(t)
            }
            SymbolSpec::Sampled { values } => {
                let n = values.len();
                let idx = (theta / (2.0 * PI) * n as f64).round() as i64;
                values[idx.rem_euclid(n as i64) as usize]
            }
        }
    }

    /// Whether the symbol has a jump discontinuity at some arc boundary.
    pub fn has_jumps(&self) -> bool {
        match self {
            SymbolSpec::Piecewise { arcs } => (0..arcs.len()).any(|i| {
                let (l, r) = boundary_limits(arcs, i);
                (l - r).norm() > 1e-14
            }),
            _ => false,
        }
    }

    /// Values on the grid `θ_m = 2πm/n`. Trigonometric polynomials are evaluated
    /// exactly; piecewise symbols average the one-sided limits at arc boundaries.
    pub fn grid_samples(&self, n: usize) -> Result<Vec<Complex64>> {
        if n == 0 {
            return invalid("grid size must be positive");
        }
        Ok(match self {
            SymbolSpec::FourierPoly { coeffs } => {
                fft::samples_from_coefficients(coeffs.values(), coeffs.lo(), n)
            }
            SymbolSpec::Sampled { values } if values.len() == n => values.clone(),
            SymbolSpec::Sampled { .. } => (0..n).map(|m| self.eval(fft::grid_angle(m, n))).collect(),
            SymbolSpec::Piecewise { arcs } => (0..n)
                .map(|m| {
                    let t = wrap_angle(fft::grid_angle(m, n));
                    match boundary_at(arcs, t) {
                        Some(i) => {
                            let (l, r) = boundary_limits(arcs, i);
                            (l + r) * 0.5
                        }
                        None => self.eval(t),
                    }
                })
                .collect(),
        })
    }

    /// Angles where the symbol may jump (arc boundaries), in `(-π, π]`.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            SymbolSpec::Piecewise { arcs } => arcs.iter().map(|a| a.end).collect(),
            _ => Vec::new(),
        }
    }
}

/// Maps any angle into `(-π, π]`.
pub(crate) fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    if t <= -PI {
        t += 2.0 * PI;
    }
    t
}

/// Index `i` of the boundary at the start of arc `i` (boundary 0 is `-π ≡ π`).
fn boundary_at(arcs: &[Arc], t: f64) -> Option<usize> {
    if (t - PI).abs() <= BOUNDARY_EPS || (t + PI).abs() <= BOUNDARY_EPS {
        return Some(0);
    }
    arcs.iter()
        .position(|a| (a.start - t).abs() <= BOUNDARY_EPS)
}

/// `(left, right)` limits at the boundary where arc `i` starts.
fn boundary_limits(arcs: &[Arc], i: usize) -> (Complex64, Complex64) {
    let left = if i == 0 {
        let last = arcs.last().expect("validated");
        last.expr.eval(last.end)
    } else {
        arcs[i - 1].expr.eval(arcs[i - 1].end)
    };
    let right = arcs[i].expr.eval(arcs[i].start);
    (left, right)
}

fn check_grid(width: usize, grid: usize) -> Result<()> {
    if grid < 4 || !grid.is_power_of_two() {
        return invalid(format!("grid size {grid} must be a power of two ≥ 4"));
    }
    if 4 * width > grid {
        return Err(Error::Aliasing {
            width,
            grid,
            required: 4 * width,
        });
    }
    Ok(())
}

/// Fourier coefficients `â_j` for `j ∈ window`.
///
/// Trigonometric polynomials return their stored coefficients exactly. Piecewise symbols
/// use `grid_size`-point uniform quadrature; sampled symbols use their own grid.
pub fn fourier_coefficients(spec: &SymbolSpec, window: IndexRange, grid_size: usize) -> Result<FourierSequence> {
    fourier_coefficients_with_report(spec, window, grid_size).map(|(s, _)| s)
}

pub fn fourier_coefficients_with_report(
    spec: &SymbolSpec,
    window: IndexRange,
    grid_size: usize,
) -> Result<(FourierSequence, QuadratureReport)> {
    match spec {
        SymbolSpec::FourierPoly { coeffs } => Ok((
            coeffs.restrict(window)?,
            QuadratureReport {
                grid_size: 0,
                has_jumps: false,
                error_estimate: Some(0.0),
            },
        )),
        SymbolSpec::Piecewise { .. } => {
            check_grid(window.len(), grid_size)?;
            let samples = spec.grid_samples(grid_size)?;
            let values = fft::coefficients_from_samples(&samples, window.lo(), window.hi());
            let error_estimate = if 4 * window.len() <= grid_size / 2 {
                let coarse = spec.grid_samples(grid_size / 2)?;
                let cv = fft::coefficients_from_samples(&coarse, window.lo(), window.hi());
                Some(
                    values
                        .iter()
                        .zip(&cv)
                        .map(|(a, b)| (a - b).norm())
                        .fold(0.0, f64::max),
                )
            } else {
                None
            };
            Ok((
                FourierSequence::new(window.lo(), values, DecayClass::C0)?,
                QuadratureReport {
                    grid_size,
                    has_jumps: spec.has_jumps(),
                    error_estimate,
                },
            ))
        }
        SymbolSpec::Sampled { values } => {
            let n = values.len();
            check_grid(window.len(), n)?;
            let c = fft::coefficients_from_samples(values, window.lo(), window.hi());
            Ok((
                FourierSequence::new(window.lo(), c, DecayClass::C0)?,
                QuadratureReport {
                    grid_size: n,
                    has_jumps: false,
                    error_estimate: None,
                },
            ))
        }
    }
}

/// `‖a‖_∞`: exact per-arc maxima for piecewise closed forms, grid maximum refined by
/// golden-section search near the largest local maxima for trigonometric polynomials,
/// and the sample maximum for sampled symbols. Never exceeds the true essential sup.
pub fn sup_norm(spec: &SymbolSpec, grid_size: usize) -> Result<f64> {
    if grid_size < 256 {
        return invalid(format!("sup_norm needs grid_size ≥ 256, got {grid_size}"));
    }
    match spec {
        SymbolSpec::Sampled { values } => Ok(values.iter().map(|v| v.norm()).fold(0.0, f64::max)),
        SymbolSpec::Piecewise { arcs } => Ok(arcs
            .iter()
            .map(|a| a.expr.sup_on(a.start, a.end))
            .fold(0.0, f64::max)),
        SymbolSpec::FourierPoly { coeffs } => Ok(trig_poly_sup(coeffs, grid_size)),
    }
}

fn trig_poly_sup(coeffs: &FourierSequence, grid_size: usize) -> f64 {
    let n = grid_size.max((8 * coeffs.len()).next_power_of_two());
    let samples = fft::samples_from_coefficients(coeffs.values(), coeffs.lo(), n);
    let mags: Vec<f64> = samples.iter().map(|v| v.norm()).collect();
    let grid_max = mags.iter().copied().fold(0.0, f64::max);
    if grid_max == 0.0 {
        return 0.0;
    }
    let mut peaks: Vec<usize> = (0..n)
        .filter(|&m| mags[m] >= mags[(m + n - 1) % n] && mags[m] >= mags[(m + 1) % n])
        .collect();
    peaks.sort_by(|&a, &b| mags[b].total_cmp(&mags[a]));
    peaks.truncate(8);
    let h = 2.0 * PI / n as f64;
    let refined = peaks
        .iter()
        .map(|&m| {
            let t0 = fft::grid_angle(m, n);
            golden_max(|t| coeffs.eval_trig(t).norm(), t0 - h, t0 + h, 80)
        })
        .fold(0.0, f64::max);
    grid_max.max(refined)
}

/// Golden-section maximization on `[a, b]`; returns the best value seen.
pub(crate) fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut best = f(a).max(f(b)).max(fc).max(fd);
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
            best = best.max(fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
            best = best.max(fd);
        }
    }
    best
}

/// `‖a‖_W = Σ_j |â_j|`, summed in increasing index order.
pub fn wiener_norm(seq: &FourierSequence) -> Result<f64> {
    if !seq.decay_class().is_summable() {
        return Err(Error::NotSummable(seq.decay_class().to_string()));
    }
    Ok(seq.values().iter().map(|v| v.norm()).sum())
}

/// `p → p` norm estimate: a certified interval `[lower, upper]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    #[serde(with = "extended_real")]
    pub p: f64,
    pub lower: f64,
    #[serde(with = "extended_real")]
    pub upper: f64,
    pub method: NormMethod,
    pub iterations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
    /// Vector attaining `lower` (`‖A x‖_p / ‖x‖_p = lower`), when one was produced.
    #[serde(skip)]
    pub witness: Option<Vec<Complex64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    ColumnSum,
    RowSum,
    SingularValue,
    PowerIteration,
    SymbolInterval,
    HardySearch,
}

impl NormEstimate {
    pub fn exact(p: f64, value: f64, method: NormMethod) -> Self {
        Self {
            p,
            lower: value,
            upper: value,
            method,
            iterations: 0,
            warning: None,
            witness: None,
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        self.lower - tol <= x && x <= self.upper + tol
    }

    /// Restores `lower ≤ upper` by widening `upper`, recording a warning.
    pub(crate) fn enforce_order(&mut self, context: &str) {
        if self.lower > self.upper {
            self.warning = Some(format!(
                "{context}: lower {} exceeded upper {}; upper widened",
                self.lower, self.upper
            ));
            self.upper = self.lower;
        }
    }
}

fn check_p(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return invalid(format!("p must lie in [1, ∞], got {p}"));
    }
    Ok(())
}

/// Riesz–Thorin exponent between `M¹` and `M²`: `θ = |2/p - 1|`.
pub fn interpolation_exponent(p: f64) -> f64 {
    (2.0 / p - 1.0).abs()
}

/// Interval for `‖a‖_{M^p} = ‖L(a)‖_{ℓ^p(ℤ)}` from a coefficient sequence.
///
/// Lower end: the larger of `‖a‖_∞` (finitely supported sequences) and the `p`-norm of
/// the `section_size` Laurent section. Upper end: `min(‖a‖_W, ‖a‖_W^θ ‖a‖_∞^{1-θ})`.
pub fn mp_norm_interval(seq: &FourierSequence, p: f64, section_size: usize) -> Result<NormEstimate> {
    check_p(p)?;
    let finite = seq.decay_class() == DecayClass::FiniteSupport;
    let sup = if finite {
        let grid = (16 * seq.len()).next_power_of_two().max(4096);
        Some(trig_poly_sup(seq, grid))
    } else {
        None
    };

    let n = if finite {
        section_size
    } else {
        // every lag in [-(n-1), n-1] must be stored
        let reach = seq.hi().min(-seq.lo());
        if reach < 0 {
            0
        } else {
            section_size.min(reach as usize + 1)
        }
    };
    let mut iterations = 0;
    let section_lower = if n > 0 {
        let op = OperatorSpec::Laurent(seq.clone());
        let sec = op.section(IndexRange::first(n), IndexRange::first(n))?;
        let est = matrix_pnorm(&sec, &PNormRequest::new(p))?;
        iterations = est.iterations;
        est.lower
    } else {
        0.0
    };

    let wiener = wiener_norm(seq).ok();
    let theta = interpolation_exponent(p);
    let interp = match (wiener, sup) {
        (Some(w), Some(s)) => Some(w.powf(theta) * s.powf(1.0 - theta)),
        (Some(w), None) if theta == 1.0 => Some(w),
        (None, Some(s)) if theta == 0.0 => Some(s),
        _ => None,
    };
    let upper = [wiener, interp]
        .into_iter()
        .flatten()
        .fold(f64::INFINITY, f64::min);

    let mut est = NormEstimate {
        p,
        lower: sup.unwrap_or(0.0).max(section_lower),
        upper,
        method: NormMethod::SymbolInterval,
        iterations,
        warning: None,
        witness: None,
    };
    est.enforce_order("mp_norm_interval");
    Ok(est)
}

/// [`mp_norm_interval`] for a symbol. Trigonometric polynomials go through their
/// coefficients; other symbols use `‖a‖_∞` as the lower end, which is also the exact
/// value at `p = 2` (`M² = L^∞` isometrically). Elsewhere the upper end is `+∞`.
pub fn mp_norm_interval_for_symbol(spec: &SymbolSpec, p: f64, section_size: usize) -> Result<NormEstimate> {
    check_p(p)?;
    if let SymbolSpec::FourierPoly { coeffs } = spec {
        return mp_norm_interval(coeffs, p, section_size);
    }
    let sup = sup_norm(spec, 4096)?;
    Ok(NormEstimate {
        p,
        lower: sup,
        upper: if p == 2.0 { sup } else { f64::INFINITY },
        method: NormMethod::SymbolInterval,
        iterations: 0,
        warning: None,
        witness: None,
    })
}

/// `c_p = ‖P‖_{B(L^p)} = 1 / sin(π/p)` for `1 < p < ∞`.
pub fn cp_constant(p: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return invalid(format!("c_p is finite only for 1 < p < ∞, got {p}"));
    }
    Ok(1.0 / (PI / p).sin())
}
