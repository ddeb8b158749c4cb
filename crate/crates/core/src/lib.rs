//! Finite-section toolkit for Toeplitz, Hankel, Laurent and Toeplitz+Hankel operators.
//!
//! The crate is organised around five layers:
//!
//! - [`symbol`]: functions on the unit circle, their Fourier coefficients and the
//!   norms `‖a‖_∞`, `‖a‖_W` and interval bounds for `‖a‖_{M^p}`.
//! - [`operators`]: dense finite sections of structured operators given by an
//!   [`OperatorSpec`](operators::OperatorSpec).
//! - [`displacement`]: the four-term displacement transform, structure predicates and
//!   the extraction of Toeplitz/Hankel parts (one-sided and two-sided), plus the
//!   Cesàro checkerboard split.
//! - [`norms`]: `p → p` matrix norms (exact at `p ∈ {1, 2, ∞}`, certified intervals
//!   otherwise), limit-operator lower bounds, norm sandwiches and compactness probes.
//! - [`hardy`]: the Hardy-space side (Riesz projection, `H^p` norms, form tables,
//!   operator-norm lower bounds and the flip-multiplier `2×2` norm).
//!
//! ```
//! use toephank_core::operators::{IndexRange, OperatorSpec};
//! use toephank_core::symbol::FourierSequence;
//! use toephank_core::displacement::extract;
//!
//! let phi = FourierSequence::trig_poly(-1, vec![1.0.into(), 0.0.into(), 1.0.into()]).unwrap();
//! let psi = FourierSequence::from_fn(1, 127, Default::default(), |j| (1.0 / j as f64).into());
//! let a = OperatorSpec::Sum(vec![OperatorSpec::Toeplitz(phi), OperatorSpec::Hankel(psi)]);
//! let section = a.section(IndexRange::first(64), IndexRange::first(64)).unwrap();
//! let dec = extract(&section, 1e-12).unwrap();
//! assert!(dec.residual <= 1e-12);
//! ```

#![forbid(unsafe_code)]
// `!(x > 0.0)` is deliberate throughout: NaN must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod displacement;
pub mod hardy;
pub mod norms;
pub mod operators;
pub mod range;
pub mod serde_ext;
pub mod symbol;

mod dense;
mod fft;

pub use num_complex::Complex64;

use thiserror::Error;

/// Maximum number of rows or columns of any dense section.
pub const SECTION_CAP: usize = 8192;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("aliasing guard: window of width {width} needs a grid of at least {required} points, got {grid}")]
    Aliasing {
        width: usize,
        grid: usize,
        required: usize,
    },

    #[error("coefficient {index} is outside the stored window [{lo}, {hi}] of a sequence without finite support")]
    MissingCoefficient { index: i64, lo: i64, hi: i64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("section of {rows}x{cols} exceeds the {cap}x{cap} cap")]
    SizeCap { rows: usize, cols: usize, cap: usize },

    #[error("incompatible ranges: {0}")]
    IncompatibleRanges(String),

    #[error("sequence with decay class {0} is not summable")]
    NotSummable(String),

    #[error("matrix is not of Toeplitz+Hankel form: displacement residual {residual:e} exceeds {tol:e}")]
    NotToeplitzPlusHankel { residual: f64, tol: f64 },

    #[error("numerical inconsistency: {0}")]
    NumericalInconsistency(String),

    #[error("iteration diverged: {0}")]
    Divergence(String),

    #[error("dense decomposition failed: {0}")]
    Decomposition(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
