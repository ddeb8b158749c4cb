//! Experiment configuration: defaults per experiment, command-line flags, then the
//! config file, each layer overriding the previous one.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use toephank_core::hardy::HardyBudget;
use toephank_core::operators::OperatorSpec;
use toephank_core::serde_ext::{complex, extended_real_vec};
use toephank_core::symbol::{DecayClass, FourierSequence, SymbolSpec};
use toephank_core::SECTION_CAP;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Experiment {
    Decompose,
    NormSweep,
    Sandwich,
    Sharpness,
    Hartman,
    Cesaro,
    Flipnorm,
    HardyConsistency,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Decompose => "decompose",
            Experiment::NormSweep => "norm_sweep",
            Experiment::Sandwich => "sandwich",
            Experiment::Sharpness => "sharpness",
            Experiment::Hartman => "hartman",
            Experiment::Cesaro => "cesaro",
            Experiment::Flipnorm => "flipnorm",
            Experiment::HardyConsistency => "hardy_consistency",
        }
    }
}

/// A symbol given inline or by name (config `symbols` first, then built-ins).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SymbolRef {
    Name(String),
    Inline(SymbolSpec),
}

/// A sequence given inline or by name (config `sequences` first, then built-ins).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SequenceRef {
    Name(String),
    Inline(FourierSequence),
}

/// Whether the Hankel probe expects a compact operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Compact,
    Noncompact,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckerboardPair {
    #[serde(with = "complex")]
    pub even: Complex64,
    #[serde(with = "complex")]
    pub odd: Complex64,
}

/// Config file contents. Every field is optional; absent fields keep the flag or
/// default value.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub name: Option<String>,
    pub experiment: Option<Experiment>,
    #[serde(default, with = "opt_extended_real_vec")]
    pub p: Option<Vec<f64>>,
    pub sizes: Option<Vec<usize>>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    #[serde(default)]
    pub symbols: BTreeMap<String, SymbolSpec>,
    #[serde(default)]
    pub sequences: BTreeMap<String, FourierSequence>,
    pub a: Option<SymbolRef>,
    pub c: Option<SymbolRef>,
    pub psi: Option<SequenceRef>,
    pub phi: Option<SequenceRef>,
    pub perturbation: Option<OperatorSpec>,
    pub threshold: Option<f64>,
    pub expect: Option<Expectation>,
    pub checkerboard: Option<CheckerboardPair>,
    pub remainder: Option<SequenceRef>,
    pub degree: Option<usize>,
    pub grid: Option<usize>,
    pub budget: Option<HardyBudget>,
}

mod opt_extended_real_vec {
    use super::*;
    use serde::Deserializer;

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<f64>>, D::Error> {
        #[derive(Deserialize)]
        struct Wrap(#[serde(with = "extended_real_vec")] Vec<f64>);
        Ok(Some(Wrap::deserialize(d)?.0))
    }
}

/// Values given on the command line.
#[derive(Clone, Debug, Default)]
pub struct Flags {
    pub p: Option<Vec<f64>>,
    pub sizes: Option<Vec<usize>>,
    pub seed: Option<u64>,
}

/// Fully resolved settings; echoed verbatim in the report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Settings {
    pub name: String,
    pub experiment: Experiment,
    #[serde(with = "extended_real_vec")]
    pub p: Vec<f64>,
    pub sizes: Vec<usize>,
    pub seed: u64,
    pub tol: f64,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub symbols: BTreeMap<String, SymbolSpec>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub sequences: BTreeMap<String, FourierSequence>,
    pub a: SymbolRef,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<SymbolRef>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi: Option<SequenceRef>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<SequenceRef>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<OperatorSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expectation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checkerboard: Option<CheckerboardPair>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub remainder: Option<SequenceRef>,
    pub degree: usize,
    pub grid: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<HardyBudget>,
}

fn name(s: &str) -> SymbolRef {
    SymbolRef::Name(s.to_string())
}

fn seq(s: &str) -> Option<SequenceRef> {
    Some(SequenceRef::Name(s.to_string()))
}

impl Settings {
    /// Defaults reproduce the reference configuration of each experiment.
    pub fn defaults(experiment: Experiment) -> Self {
        let mut s = Settings {
            name: experiment.name().to_string(),
            experiment,
            p: vec![2.0],
            sizes: vec![64],
            seed: 0,
            tol: 1e-12,
            symbols: BTreeMap::new(),
            sequences: BTreeMap::new(),
            a: name("z+1/z"),
            c: None,
            psi: None,
            phi: None,
            perturbation: None,
            threshold: None,
            expect: None,
            checkerboard: None,
            remainder: None,
            degree: 16,
            grid: 1 << 12,
            budget: None,
        };
        match experiment {
            Experiment::Decompose => {
                s.psi = seq("harmonic");
            }
            Experiment::NormSweep => {
                s.sizes = vec![4, 16, 64];
                s.tol = 1e-10;
            }
            Experiment::Sandwich => {
                s.psi = seq("harmonic");
                s.sizes = vec![64, 128, 256, 512];
                s.tol = 1e-6;
            }
            Experiment::Sharpness => {
                s.a = name("sharpness");
                s.p = vec![2.0, 4.0];
                s.sizes = vec![];
                s.tol = 1e-6;
            }
            Experiment::Hartman => {
                s.psi = seq("inverse_square");
                s.sizes = vec![64, 128, 256];
                s.threshold = Some(0.1);
                s.expect = Some(Expectation::Compact);
                s.tol = 0.0;
            }
            Experiment::Cesaro => {
                s.phi = seq("z+1/z+checkerboard");
                s.sizes = vec![50, 100, 200];
                s.checkerboard = Some(CheckerboardPair {
                    even: Complex64::new(1.0, 0.0),
                    odd: Complex64::new(-1.0, 0.0),
                });
                s.remainder = seq("z+1/z");
                s.tol = 3.0;
            }
            Experiment::Flipnorm => {
                s.a = name("1+z/2");
                s.c = Some(name("z^2/3"));
                s.sizes = vec![64, 512];
                s.tol = 0.02;
            }
            Experiment::HardyConsistency => {
                s.a = name("sharpness");
                s.p = vec![4.0];
                s.sizes = vec![8];
                s.grid = 1 << 20;
                s.tol = 1e-10;
            }
        }
        s
    }

    pub fn resolve(experiment: Experiment, flags: &Flags, file: Option<ConfigFile>) -> Result<Self, CliError> {
        let file = file.unwrap_or_default();
        if let Some(e) = file.experiment {
            if e != experiment {
                return Err(CliError::Config(format!(
                    "config is for experiment '{}', not '{}'",
                    e.name(),
                    experiment.name()
                )));
            }
        }
        let mut s = Settings::defaults(experiment);
        if let Some(p) = &flags.p {
            s.p = p.clone();
        }
        if let Some(sizes) = &flags.sizes {
            s.sizes = sizes.clone();
        }
        if let Some(seed) = flags.seed {
            s.seed = seed;
        }
        macro_rules! take {
            ($field:ident) => {
                if let Some(v) = file.$field {
                    s.$field = v;
                }
            };
            ($field:ident, opt) => {
                if file.$field.is_some() {
                    s.$field = file.$field;
                }
            };
        }
        take!(name);
        take!(p);
        take!(sizes);
        take!(seed);
        take!(tol);
        take!(a);
        take!(degree);
        take!(grid);
        take!(c, opt);
        take!(psi, opt);
        take!(phi, opt);
        take!(perturbation, opt);
        take!(threshold, opt);
        take!(expect, opt);
        take!(checkerboard, opt);
        take!(remainder, opt);
        take!(budget, opt);
        s.symbols = file.symbols;
        s.sequences = file.sequences;
        if experiment == Experiment::Sharpness && s.budget.is_none() {
            s.budget = Some(HardyBudget {
                seed: s.seed,
                ..HardyBudget::default()
            });
        }
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.p.is_empty() {
            return bad("at least one p is required".into());
        }
        if let Some(p) = self.p.iter().find(|p| !(**p >= 1.0)) {
            return bad(format!("p must lie in [1, ∞], got {p}"));
        }
        if self.experiment != Experiment::Sharpness && self.sizes.is_empty() {
            return bad("at least one size is required".into());
        }
        if let Some(n) = self.sizes.iter().find(|&&n| n == 0 || n > SECTION_CAP) {
            return bad(format!("size {n} outside 1..={SECTION_CAP}"));
        }
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return bad(format!("tol must be finite and nonnegative, got {}", self.tol));
        }
        // resolve every reference once so typos fail before any run starts
        self.symbol(&self.a, 2.0)?;
        if let Some(c) = &self.c {
            self.symbol(c, 2.0)?;
        }
        for r in [&self.psi, &self.phi, &self.remainder].into_iter().flatten() {
            self.sequence(r, 1)?;
        }
        Ok(())
    }

    /// Resolves a symbol; `p` parametrizes the `sharpness` built-in.
    pub fn symbol(&self, r: &SymbolRef, p: f64) -> Result<SymbolSpec, CliError> {
        let name = match r {
            SymbolRef::Inline(spec) => return Ok(spec.clone()),
            SymbolRef::Name(name) => name,
        };
        if let Some(spec) = self.symbols.get(name) {
            return Ok(spec.clone());
        }
        let poly = |lo: i64, v: &[f64]| {
            FourierSequence::trig_poly(lo, v.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .map(SymbolSpec::fourier_poly)
        };
        let spec = match name.as_str() {
            "z+1/z" => poly(-1, &[1.0, 0.0, 1.0]),
            "1+z/2" => poly(0, &[1.0, 0.5]),
            "z^2/3" => poly(2, &[1.0 / 3.0]),
            "zero" => poly(0, &[0.0]),
            "sharpness" => SymbolSpec::sharpness(p),
            _ => return Err(CliError::Unresolved(format!("symbol '{name}'"))),
        };
        spec.map_err(CliError::Core)
    }

    /// Resolves a sequence; built-ins are generated on `[lo, reach]`, enough for any
    /// request up to index `reach`.
    pub fn sequence(&self, r: &SequenceRef, reach: i64) -> Result<FourierSequence, CliError> {
        let name = match r {
            SequenceRef::Inline(s) => return Ok(s.clone()),
            SequenceRef::Name(name) => name,
        };
        if let Some(s) = self.sequences.get(name) {
            return Ok(s.clone());
        }
        let reach = reach.max(1);
        let one = Complex64::new(1.0, 0.0);
        Ok(match name.as_str() {
            "harmonic" => FourierSequence::power_decay(reach, 1),
            "inverse_square" => FourierSequence::power_decay(reach, 2),
            "e1" => FourierSequence::unit(1),
            "z+1/z" => FourierSequence::trig_poly(-1, vec![one, Complex64::new(0.0, 0.0), one])?,
            "z+1/z+checkerboard" => FourierSequence::from_fn(-reach, reach, DecayClass::Bounded, |m| {
                let base = if m.abs() == 1 { one } else { Complex64::new(0.0, 0.0) };
                base + if m % 2 == 0 { one } else { -one }
            }),
            _ => return Err(CliError::Unresolved(format!("sequence '{name}'"))),
        })
    }
}

pub fn read_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}
