use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dense;
use crate::operators::{apply, FiniteSection};
use crate::serde_ext::extended_real;
use crate::symbol::{NormEstimate, NormMethod};
use crate::{invalid, Error, Result};

/// Largest side for which the `p = 2` pair enters the general-`p` upper bound.
const SPECTRAL_PAIR_CAP: usize = 2048;

/// Parameters of a `p → p` norm computation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PNormRequest {
    #[serde(with = "extended_real")]
    pub p: f64,
    pub multistarts: usize,
    pub max_iter: usize,
    pub seed: u64,
    /// Relative stopping tolerance of the power iteration and the allowed overshoot of
    /// `lower` past `upper`.
    pub tol: f64,
}

impl PNormRequest {
    pub fn new(p: f64) -> Self {
        Self {
            p,
            multistarts: 8,
            max_iter: 200,
            seed: 0,
            tol: 1e-10,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_multistarts(mut self, multistarts: usize) -> Self {
        self.multistarts = multistarts;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.p.is_nan() || self.p < 1.0 {
            return invalid(format!("p must lie in [1, ∞], got {}", self.p));
        }
        if self.multistarts == 0 {
            return invalid("multistarts must be at least 1");
        }
        if !(self.tol > 0.0) {
            return invalid(format!("tol must be positive, got {}", self.tol));
        }
        Ok(())
    }
}

/// `‖x‖_p` for `p ∈ [1, ∞]`.
pub fn lp_norm(x: &[Complex64], p: f64) -> f64 {
    if p == f64::INFINITY {
        return x.iter().map(|z| z.norm()).fold(0.0, f64::max);
    }
    if p == 1.0 {
        return x.iter().map(|z| z.norm()).sum();
    }
    let scale = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    scale * x.iter().map(|z| (z.norm() / scale).powf(p)).sum::<f64>().powf(1.0 / p)
}

/// Maximum absolute column sum and its (first) column.
fn max_column_sum(a: &FiniteSection) -> (f64, usize) {
    let mut best = (f64::NEG_INFINITY, 0);
    for c in 0..a.ncols() {
        let s: f64 = (0..a.nrows()).map(|r| a.at(r, c).norm()).sum();
        if s > best.0 {
            best = (s, c);
        }
    }
    best
}

/// Maximum absolute row sum and its (first) row.
fn max_row_sum(a: &FiniteSection) -> (f64, usize) {
    let mut best = (f64::NEG_INFINITY, 0);
    for r in 0..a.nrows() {
        let s: f64 = (0..a.ncols()).map(|c| a.at(r, c).norm()).sum();
        if s > best.0 {
            best = (s, r);
        }
    }
    best
}

fn phase(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        z / r
    }
}

/// `z` with `‖z‖_{p'} = 1` and `⟨y, z⟩ = ‖y‖_p`, where `1/p + 1/p' = 1`.
fn dual(y: &[Complex64], p: f64) -> Vec<Complex64> {
    let norm = lp_norm(y, p);
    if norm == 0.0 {
        return vec![Complex64::new(0.0, 0.0); y.len()];
    }
    y.iter().map(|z| phase(*z) * (z.norm() / norm).powf(p - 1.0)).collect()
}

struct Run {
    value: f64,
    x: Vec<Complex64>,
    iterations: usize,
}

fn power_iteration(a: &FiniteSection, ah: &FiniteSection, p: f64, x0: Vec<Complex64>, req: &PNormRequest) -> Result<Run> {
    let q = p / (p - 1.0);
    let ratio = |x: &[Complex64]| -> Result<f64> {
        let v = lp_norm(&apply(a, x)?, p) / lp_norm(x, p);
        if !v.is_finite() {
            return Err(Error::Divergence(format!("non-finite ratio ‖Ax‖/‖x‖ = {v} at p = {p}")));
        }
        Ok(v)
    };
    let mut x = x0;
    let mut best = Run {
        value: ratio(&x)?,
        x: x.clone(),
        iterations: 0,
    };
    let mut last = best.value;
    let mut last_step = f64::INFINITY;
    for it in 1..=req.max_iter {
        let y = apply(a, &x)?;
        if lp_norm(&y, p) == 0.0 {
            break;
        }
        let z = apply(ah, &dual(&y, p))?;
        let next = dual(&z, q);
        if lp_norm(&next, p) == 0.0 {
            break;
        }
        let v = ratio(&next)?;
        x = next;
        // linear convergence: with step ratio ρ the remaining gap is about step·ρ/(1-ρ)
        let step = v - last;
        let rho = (step / last_step).clamp(0.0, 0.999);
        let remaining = if step > 0.0 { step * rho / (1.0 - rho) } else { 0.0 };
        let improved = step > v * req.tol || remaining > v * req.tol;
        last = v;
        last_step = step;
        if v > best.value {
            best = Run {
                value: v,
                x: x.clone(),
                iterations: it,
            };
        }
        best.iterations = it;
        if !improved {
            break;
        }
    }
    Ok(best)
}

fn start_vector(n: usize, seed: u64, index: usize) -> Vec<Complex64> {
    if index == 0 {
        return vec![Complex64::new(1.0, 0.0); n];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    (0..n)
        .map(|_| Complex64::new(if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0))
        .collect()
}

/// `‖A‖_{p→p}` as a certified interval.
///
/// `p = 1` and `p = ∞` are exact (column and row sums, first maximizing index wins);
/// `p = 2` is the largest singular value. Otherwise `lower` is the best ratio
/// `‖Ax‖_p / ‖x‖_p` over multistart nonlinear power iterations (start 0 is the all-ones
/// vector, start `i` uses random signs from stream `i` of the seeded generator) and
/// `upper` is the smallest Riesz–Thorin bound from the exact `{1, 2, ∞}` norms.
pub fn matrix_pnorm(a: &FiniteSection, req: &PNormRequest) -> Result<NormEstimate> {
    req.validate()?;
    let p = req.p;
    if p == 1.0 {
        let (v, c) = max_column_sum(a);
        let mut e = NormEstimate::exact(p, v, NormMethod::ColumnSum);
        let mut w = vec![Complex64::new(0.0, 0.0); a.ncols()];
        w[c] = Complex64::new(1.0, 0.0);
        e.witness = Some(w);
        return Ok(e);
    }
    if p == f64::INFINITY {
        let (v, r) = max_row_sum(a);
        let mut e = NormEstimate::exact(p, v, NormMethod::RowSum);
        e.witness = Some(
            (0..a.ncols())
                .map(|c| {
                    let z = phase(a.at(r, c)).conj();
                    if z == Complex64::new(0.0, 0.0) {
                        Complex64::new(1.0, 0.0)
                    } else {
                        z
                    }
                })
                .collect(),
        );
        return Ok(e);
    }
    if p == 2.0 {
        let v = dense::spectral_norm(a.entries(), a.nrows(), a.ncols())?;
        return Ok(NormEstimate::exact(p, v, NormMethod::SingularValue));
    }

    let n1 = max_column_sum(a).0;
    let ninf = max_row_sum(a).0;
    let mut upper = n1.powf(1.0 / p) * ninf.powf(1.0 - 1.0 / p);
    if a.nrows().max(a.ncols()) <= SPECTRAL_PAIR_CAP {
        let n2 = dense::spectral_norm(a.entries(), a.nrows(), a.ncols())?;
        let pair = if p < 2.0 {
            let theta = 2.0 - 2.0 / p;
            n1.powf(1.0 - theta) * n2.powf(theta)
        } else {
            let theta = 2.0 / p;
            n2.powf(theta) * ninf.powf(1.0 - theta)
        };
        upper = upper.min(pair);
    }

    let ah = a.adjoint();
    let runs = (0..req.multistarts)
        .into_par_iter()
        .map(|i| power_iteration(a, &ah, p, start_vector(a.ncols(), req.seed, i), req))
        .collect::<Result<Vec<_>>>()?;
    let iterations = runs.iter().map(|r| r.iterations).sum();
    // ties go to the earliest start, independent of scheduling
    let best = runs
        .into_iter()
        .reduce(|b, r| if r.value > b.value { r } else { b })
        .expect("multistarts ≥ 1");

    if best.value > upper * (1.0 + req.tol) + f64::EPSILON {
        return Err(Error::NumericalInconsistency(format!(
            "p = {p}: power-iteration lower bound {} exceeds interpolation upper bound {upper}",
            best.value
        )));
    }
    let mut est = NormEstimate {
        p,
        lower: best.value,
        upper,
        method: NormMethod::PowerIteration,
        iterations,
        warning: None,
        witness: Some(best.x),
    };
    est.enforce_order("matrix_pnorm");
    Ok(est)
}
