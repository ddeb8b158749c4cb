//! One runner per experiment. Runs are independent and execute on the rayon pool;
//! cross-run checks are collected afterwards in a `summary` run.

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;
use toephank_core::displacement::{cesaro_checkerboard_split, displacement_residual, extract};
use toephank_core::hardy::{
    classify, flip_multiplier_norm, form_table, hp_opnorm_lower, pairing, riesz_project, CoeffPolynomial,
    FormKind,
};
use toephank_core::norms::{hartman_profile, matrix_pnorm, sandwich_check_with, PNormRequest};
use toephank_core::operators::{IndexRange, OperatorSpec};
use toephank_core::symbol::{fourier_coefficients, sup_norm, FourierSequence, SymbolSpec};

use crate::config::{Experiment, Expectation, Settings};
use crate::report::{Assertion, Real, RunResult};
use crate::CliError;

type Job<'a> = Box<dyn Fn() -> Result<RunResult, CliError> + Send + Sync + 'a>;

pub fn run(s: &Settings) -> Vec<RunResult> {
    let jobs: Vec<(String, Option<f64>, Option<usize>, Job)> = match s.experiment {
        Experiment::Decompose => grid_jobs(s, &[2.0], |n, _| Box::new(move || decompose(s, n))),
        Experiment::NormSweep => grid_jobs(s, &s.p, |n, p| Box::new(move || norm_sweep(s, p, n))),
        Experiment::Sandwich => grid_jobs(s, &s.p, |n, p| Box::new(move || sandwich(s, p, n))),
        Experiment::Sharpness => s
            .p
            .iter()
            .map(|&p| {
                let job: Job = Box::new(move || sharpness(s, p));
                (format!("sharpness/p={}", fmt_p(p)), Some(p), None, job)
            })
            .collect(),
        Experiment::Hartman => grid_jobs(s, &[2.0], |n, _| Box::new(move || hartman(s, n))),
        Experiment::Cesaro => grid_jobs(s, &[2.0], |n, _| Box::new(move || cesaro(s, n))),
        Experiment::Flipnorm => s
            .p
            .iter()
            .flat_map(|&p| {
                // the ℓ^p(ℤ) section equals the L^p multiplier norm only through Plancherel
                let sizes: Vec<Option<usize>> =
                    if p == 2.0 { s.sizes.iter().map(|&n| Some(n)).collect() } else { vec![None] };
                sizes.into_iter().map(move |n| {
                    let job: Job = Box::new(move || flipnorm(s, p, n));
                    (run_id(s, Some(p), n), Some(p), n, job)
                })
            })
            .collect(),
        Experiment::HardyConsistency => grid_jobs(s, &s.p, |n, p| Box::new(move || hardy_consistency(s, p, n))),
    };
    let mut runs: Vec<RunResult> = jobs
        .par_iter()
        .map(|(id, p, n, job)| match job() {
            Ok(mut r) => {
                r.run = id.clone();
                r.p = p.map(Real);
                r.n = *n;
                r
            }
            Err(e) => RunResult::failed(id.clone(), *p, *n, e.to_string()),
        })
        .collect();
    if let Some(summary) = summarize(s, &runs) {
        runs.push(summary);
    }
    runs
}

fn fmt_p(p: f64) -> String {
    if p == f64::INFINITY {
        "inf".into()
    } else {
        format!("{p}")
    }
}

fn run_id(s: &Settings, p: Option<f64>, n: Option<usize>) -> String {
    let mut id = s.experiment.name().to_string();
    if let Some(p) = p {
        id += &format!("/p={}", fmt_p(p));
    }
    if let Some(n) = n {
        id += &format!("/n={n}");
    }
    id
}

fn grid_jobs<'a>(
    s: &'a Settings,
    ps: &[f64],
    make: impl Fn(usize, f64) -> Job<'a>,
) -> Vec<(String, Option<f64>, Option<usize>, Job<'a>)> {
    let with_p = !matches!(s.experiment, Experiment::Decompose | Experiment::Hartman | Experiment::Cesaro);
    ps.iter()
        .flat_map(|&p| s.sizes.iter().map(move |&n| (p, n)))
        .map(|(p, n)| {
            let p_opt = with_p.then_some(p);
            (run_id(s, p_opt, Some(n)), p_opt, Some(n), make(n, p))
        })
        .collect()
}

fn series_name(s: &Settings, base: &str, p: f64) -> String {
    if s.p.len() > 1 {
        format!("{base} p={}", fmt_p(p))
    } else {
        base.to_string()
    }
}

/// Fourier coefficients of `a` on lags `[-lag, lag]`: read off for trigonometric
/// polynomials, quadrature otherwise.
fn coefficients(a: &SymbolSpec, lag: i64, grid: usize) -> Result<FourierSequence, CliError> {
    if let SymbolSpec::FourierPoly { coeffs } = a {
        return Ok(coeffs.clone());
    }
    let lag = lag.max(1);
    let grid = grid.max((8 * lag as usize + 8).next_power_of_two());
    Ok(fourier_coefficients(a, IndexRange::new(-lag, lag)?, grid)?)
}

fn toeplitz_plus_hankel(s: &Settings, n: usize, p: f64) -> Result<OperatorSpec, CliError> {
    let a = s.symbol(&s.a, p)?;
    let mut terms = vec![OperatorSpec::Toeplitz(coefficients(&a, n as i64 - 1, s.grid)?)];
    if let Some(psi) = &s.psi {
        terms.push(OperatorSpec::Hankel(s.sequence(psi, 2 * n as i64)?));
    }
    if let Some(k) = &s.perturbation {
        terms.push(k.clone());
    }
    Ok(OperatorSpec::Sum(terms))
}

fn request(s: &Settings, p: f64) -> PNormRequest {
    PNormRequest::new(p).with_seed(s.seed)
}

fn decompose(s: &Settings, n: usize) -> Result<RunResult, CliError> {
    let w = IndexRange::first(n);
    let a = toeplitz_plus_hankel(s, n, 2.0)?.section(w, w)?;
    let structure = displacement_residual(&a)?;
    let machine_zero = 8.0 * f64::EPSILON * a.max_abs();
    let dec = extract(&a, s.tol)?;
    let residual = a.max_abs_diff(&dec.reconstruct()?)?;
    let mut r = RunResult::new("");
    r.value = Some(Real(residual));
    r.assertions = vec![
        Assertion::le("displacement of A vanishes: max|D(A)| ≤ 8ε·max|A|", structure, 0.0, machine_zero),
        Assertion::le("roundtrip: max|A - T(φ) - H(ψ)| ≤ tol", residual, 0.0, s.tol),
    ];
    r.details = json!({
        "canonical": dec.canonical,
        "tail_variance": dec.tail_variance,
        "checkerboard": dec.checkerboard,
    });
    r.series = vec![("residual".into(), n as f64, residual)];
    Ok(r)
}

fn norm_sweep(s: &Settings, p: f64, n: usize) -> Result<RunResult, CliError> {
    let w = IndexRange::first(n);
    let est = matrix_pnorm(&toeplitz_plus_hankel(s, n, p)?.section(w, w)?, &request(s, p).with_tol(s.tol))?;
    let mut r = RunResult::new("");
    r.lower = Some(Real(est.lower));
    r.value = Some(Real(est.lower));
    r.upper = Some(Real(est.upper));
    r.assertions = vec![Assertion::le("interval ordered: lower ≤ upper", est.lower, est.upper, 0.0)];
    r.details = json!({ "method": est.method, "iterations": est.iterations });
    r.series = vec![(series_name(s, "norm", p), n as f64, est.lower)];
    Ok(r)
}

fn sandwich(s: &Settings, p: f64, n: usize) -> Result<RunResult, CliError> {
    let a = s.symbol(&s.a, p)?;
    let psi = match &s.psi {
        Some(r) => s.sequence(r, 2 * n as i64)?,
        None => FourierSequence::zeros(1, 1),
    };
    let rep = sandwich_check_with(&a, &psi, s.perturbation.as_ref(), n, &request(s, p), s.tol)?;
    let mut r = RunResult::new("");
    r.lower = Some(Real(rep.lower_bound));
    r.value = Some(Real(rep.operator_norm.lower));
    r.upper = Some(Real(rep.upper_bound));
    r.assertions = vec![
        Assertion::le(
            "max{‖a‖_{M^p}, ½‖H(ψ)+K‖} ≤ ‖A_n‖",
            rep.lower_bound,
            rep.operator_norm.upper,
            s.tol,
        ),
        Assertion::le(
            "‖A_n‖ ≤ ‖a‖_{M^p} + ‖H(ψ)+K‖",
            rep.operator_norm.lower,
            rep.upper_bound,
            s.tol,
        ),
    ];
    r.series = vec![
        (series_name(s, "lower", p), n as f64, rep.lower_bound),
        (series_name(s, "value", p), n as f64, rep.operator_norm.lower),
        (series_name(s, "upper", p), n as f64, rep.upper_bound),
    ];
    r.details = serde_json::to_value(&rep).unwrap_or_default();
    Ok(r)
}

fn sharpness(s: &Settings, p: f64) -> Result<RunResult, CliError> {
    let a = s.symbol(&s.a, p)?;
    let budget = s.budget.clone().unwrap_or_default();
    let res = hp_opnorm_lower(&a, None, p, s.degree, &budget)?;
    let sup = sup_norm(&a, 4096)?;
    let (lower, upper) = (res.estimate.lower, res.estimate.upper);
    let mut r = RunResult::new("");
    r.lower = Some(Real(lower));
    r.value = Some(Real(res.search_value));
    r.upper = Some(Real(upper));
    r.assertions = vec![
        Assertion::le("‖a‖_∞ ≤ ‖T(a)‖ (lower)", sup, lower, s.tol),
        Assertion::le("‖T(a)‖ (lower) ≤ c_p‖a‖_∞", lower, res.cp * sup, s.tol),
        Assertion::le("lower ≤ upper", lower, upper, 0.0),
    ];
    if res.cp == 1.0 {
        r.assertions.push(Assertion::le("c_p = 1: upper - lower ≤ tol", upper - lower, 0.0, s.tol));
    }
    r.details = json!({
        "cp": res.cp,
        "sup_norm": sup,
        "input_degree": res.input_degree,
        "output_degree": res.output_degree,
        "budget": budget,
        "budget_exhausted": res.budget_exhausted,
    });
    r.series = vec![
        ("lower".into(), p, lower),
        ("upper".into(), p, upper),
        ("cp".into(), p, res.cp),
    ];
    Ok(r)
}

fn hartman(s: &Settings, n: usize) -> Result<RunResult, CliError> {
    let psi = s.sequence(s.psi.as_ref().ok_or_else(|| CliError::Config("hartman needs psi".into()))?, 2 * n as i64)?;
    let threshold = s.threshold.unwrap_or(0.1);
    let row = hartman_profile(&psi, &[n], threshold)?.remove(0);
    let mut r = RunResult::new("");
    r.value = Some(Real(row.norm));
    r.details = json!({ "count": row.count, "threshold": threshold });
    r.series = vec![("count".into(), n as f64, row.count as f64), ("norm".into(), n as f64, row.norm)];
    Ok(r)
}

fn cesaro(s: &Settings, n: usize) -> Result<RunResult, CliError> {
    let reach = 2 * n as i64 + 8;
    let phi = s.sequence(s.phi.as_ref().ok_or_else(|| CliError::Config("cesaro needs phi".into()))?, reach)?;
    let split = cesaro_checkerboard_split(&phi, n)?;
    let rate = s.tol / (2 * n + 1) as f64;
    let mut r = RunResult::new("");
    if let Some(expected) = s.checkerboard {
        let err = (split.checkerboard.even - expected.even)
            .norm()
            .max((split.checkerboard.odd - expected.odd).norm());
        r.value = Some(Real(err));
        r.assertions.push(Assertion::le("checkerboard pair error ≤ tol/(2n+1)", err, 0.0, rate));
        r.series.push(("pair_error".into(), n as f64, err));
    }
    if let Some(rem) = &s.remainder {
        let expected = s.sequence(rem, reach)?;
        let mut err = 0.0f64;
        for (m, v) in split.remainder.iter() {
            err = err.max((v - expected.coeff(m)?).norm());
        }
        r.assertions.push(Assertion::le("remainder error ≤ tol/(2n+1)", err, 0.0, rate));
        r.series.push(("remainder_error".into(), n as f64, err));
    }
    r.series.push(("rate".into(), n as f64, rate));
    r.details = json!({
        "checkerboard": split.checkerboard,
        "reported_lags": [split.remainder.lo(), split.remainder.hi()],
    });
    Ok(r)
}

fn flipnorm(s: &Settings, p: f64, n: Option<usize>) -> Result<RunResult, CliError> {
    let a = s.symbol(&s.a, p)?;
    let c = s.symbol(s.c.as_ref().ok_or_else(|| CliError::Config("flipnorm needs c".into()))?, p)?;
    let formula = flip_multiplier_norm(&a, &c, p, s.grid)?;
    let mut r = RunResult::new("");
    r.upper = Some(Real(formula));
    let entry_bound = sup_norm(&a, 4096)?.max(sup_norm(&c, 4096)?);
    r.assertions.push(Assertion::le(
        "max(‖a‖_∞, ‖c‖_∞) ≤ ‖M(a)+M(c)J‖ (relative 1e-6)",
        entry_bound,
        formula,
        1e-6 * formula,
    ));
    match n {
        Some(n) => {
            let half = n.div_ceil(2);
            let lag = 2 * half as i64;
            let spec = OperatorSpec::Sum(vec![
                OperatorSpec::Laurent(coefficients(&a, lag, s.grid)?),
                OperatorSpec::Compose(vec![OperatorSpec::Laurent(coefficients(&c, lag, s.grid)?), OperatorSpec::Flip]),
            ]);
            let w = IndexRange::symmetric(half);
            let section = matrix_pnorm(&spec.section(w, w)?, &request(s, p))?.lower;
            r.lower = Some(Real(section));
            r.value = Some(Real(section));
            r.assertions.push(Assertion::le(
                "‖section of L(â)+L(ĉ)J‖ ≤ ‖M(a)+M(c)J‖ (relative 1e-9)",
                section,
                formula,
                1e-9 * formula,
            ));
            if Some(n) == s.sizes.iter().copied().max() {
                let gap = (formula - section).abs() / formula.max(f64::MIN_POSITIVE);
                r.assertions.push(Assertion::le(
                    "largest section within relative tol of ‖M(a)+M(c)J‖",
                    gap,
                    0.0,
                    s.tol,
                ));
            }
            r.series = vec![
                ("section".into(), 2.0 * half as f64, section),
                ("symbol".into(), 2.0 * half as f64, formula),
            ];
        }
        None => {
            r.value = Some(Real(formula));
            r.series = vec![("symbol".into(), p, formula)];
        }
    }
    Ok(r)
}

fn hardy_consistency(s: &Settings, p: f64, m: usize) -> Result<RunResult, CliError> {
    let a = s.symbol(&s.a, p)?;
    let lag = m as i64;
    let t = form_table(&a, FormKind::Toeplitz, m, s.grid)?;
    let h = form_table(&a, FormKind::Hankel, m, s.grid)?;
    let coeffs = fourier_coefficients(&a, IndexRange::new(-lag, 2 * lag)?, s.grid)?;
    let (mut t_err, mut h_err) = (0.0f64, 0.0f64);
    for j in 0..m {
        for k in 0..m {
            let (jt, kt) = (j as i64, k as i64);
            t_err = t_err.max((t.entries.at(j, k) - coeffs.coeff(jt - kt)?).norm());
            h_err = h_err.max((h.entries.at(j, k) - coeffs.coeff(jt + kt + 1)?).norm());
        }
    }
    // ⟨T(a)χ_k, χ_j⟩ = ⟨P(aχ_k), χ_j⟩ from a wider coefficient window
    let wide = fourier_coefficients(&a, IndexRange::new(-4 * lag, 4 * lag)?, s.grid)?;
    let mut pair_err = 0.0f64;
    let pair_grid = (8 * (5 * m + 1)).next_power_of_two();
    for k in 0..m {
        let projected = riesz_project(&wide.shifted(k as i64));
        for j in 0..m {
            let v: Complex64 = pairing(&projected, &CoeffPolynomial::monomial(j), pair_grid)?;
            pair_err = pair_err.max((v - wide.coeff(j as i64 - k as i64)?).norm());
        }
    }
    let mut r = RunResult::new("");
    r.value = Some(Real(t_err.max(h_err).max(pair_err)));
    r.assertions = vec![
        Assertion::le("Toeplitz form table: max|t_jk - â_{j-k}| ≤ tol", t_err, 0.0, s.tol),
        Assertion::le("Hankel form table: max|h_jk - â_{j+k+1}| ≤ tol", h_err, 0.0, s.tol),
        Assertion::le("pairing: max|⟨P(aχ_k), χ_j⟩ - â_{j-k}| ≤ tol", pair_err, 0.0, s.tol),
    ];
    r.details = json!({
        "toeplitz_kind": classify(&t.entries),
        "hankel_kind": classify(&h.entries),
        "grid": s.grid,
    });
    r.series = vec![("max_error".into(), m as f64, t_err.max(h_err).max(pair_err))];
    Ok(r)
}

/// Checks that compare runs across sizes.
fn summarize(s: &Settings, runs: &[RunResult]) -> Option<RunResult> {
    let value = |r: &RunResult| r.value.map(|v| v.0);
    let mut out = RunResult::new(format!("{}/summary", s.experiment.name()));
    match s.experiment {
        Experiment::NormSweep => {
            for &p in &s.p {
                if !(p == 1.0 || p == 2.0 || p == f64::INFINITY) {
                    continue;
                }
                let mut by_n: Vec<(usize, f64)> = runs
                    .iter()
                    .filter(|r| r.p == Some(Real(p)))
                    .filter_map(|r| Some((r.n?, value(r)?)))
                    .collect();
                by_n.sort_by_key(|x| x.0);
                let worst = by_n.windows(2).map(|w| w[0].1 - w[1].1).fold(f64::NEG_INFINITY, f64::max);
                if by_n.len() > 1 {
                    out.assertions.push(Assertion::le(
                        format!("p = {}: ‖A_n‖ nondecreasing in n (max drop ≤ tol)", fmt_p(p)),
                        worst,
                        0.0,
                        1e-12 * by_n.last().map_or(1.0, |x| x.1.max(1.0)),
                    ));
                }
            }
        }
        Experiment::Hartman => {
            let mut rows: Vec<(usize, usize, f64)> = runs
                .iter()
                .filter_map(|r| Some((r.n?, r.details.get("count")?.as_u64()? as usize, value(r)?)))
                .collect();
            rows.sort_by_key(|x| x.0);
            if rows.len() < 2 {
                return None;
            }
            let counts: Vec<usize> = rows.iter().map(|x| x.1).collect();
            let (first, last) = (counts[0] as f64, counts[counts.len() - 1] as f64);
            match s.expect.unwrap_or(Expectation::Compact) {
                Expectation::Compact => out.assertions.push(Assertion::flag(
                    "compact: singular-value counts above threshold identical across sizes (first vs last)",
                    first,
                    last,
                    0.0,
                    counts.windows(2).all(|w| w[0] == w[1]),
                )),
                Expectation::Noncompact => out.assertions.push(Assertion::flag(
                    "noncompact: singular-value counts above threshold strictly increasing (first vs last)",
                    first,
                    last,
                    0.0,
                    counts.windows(2).all(|w| w[0] < w[1]),
                )),
            }
            let worst = rows.windows(2).map(|w| w[0].2 - w[1].2).fold(f64::NEG_INFINITY, f64::max);
            out.assertions.push(Assertion::le("‖H_n‖ nondecreasing in n (max drop ≤ tol)", worst, 0.0, 1e-12));
            out.details = json!({ "counts": counts });
        }
        _ => return None,
    }
    if out.assertions.is_empty() {
        None
    } else {
        Some(out)
    }
}
