//! Report types and the three output files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use toephank_core::serde_ext::extended_real;

use crate::config::Settings;
use crate::CliError;

/// Real number that may be `∞` (serialized as `"inf"`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Real(#[serde(with = "extended_real")] pub f64);

/// One checked inequality or property. `holds` is `lhs ≤ rhs` unless stated otherwise
/// in `check`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assertion {
    pub check: String,
    pub tol: f64,
    pub lhs: Real,
    pub rhs: Real,
    pub holds: bool,
}

impl Assertion {
    /// `lhs ≤ rhs + tol`.
    pub fn le(check: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self {
            check: check.into(),
            tol,
            lhs: Real(lhs),
            rhs: Real(rhs),
            holds: lhs <= rhs + tol,
        }
    }

    /// A boolean property; `lhs`/`rhs` carry the two compared quantities.
    pub fn flag(check: impl Into<String>, lhs: f64, rhs: f64, tol: f64, holds: bool) -> Self {
        Self {
            check: check.into(),
            tol,
            lhs: Real(lhs),
            rhs: Real(rhs),
            holds,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunResult {
    pub run: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<Real>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<Real>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<Real>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<Real>,
    pub assertions: Vec<Assertion>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
    #[serde(skip)]
    pub series: Vec<(String, f64, f64)>,
}

impl RunResult {
    pub fn new(run: impl Into<String>) -> Self {
        Self {
            run: run.into(),
            ..Self::default()
        }
    }

    /// A run that errored counts as failed.
    pub fn ok(&self) -> bool {
        self.error.is_none() && self.assertions.iter().all(|a| a.holds)
    }

    pub fn failed(run: impl Into<String>, p: Option<f64>, n: Option<usize>, error: String) -> Self {
        Self {
            p: p.map(Real),
            n,
            error: Some(error),
            ..Self::new(run)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Environment {
    pub tool: &'static str,
    pub version: &'static str,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub config: Settings,
    pub environment: Environment,
    pub runs: Vec<RunResult>,
    pub assertions: usize,
    pub failed: usize,
    pub passed: bool,
    pub wall_time_s: f64,
}

impl Report {
    pub fn new(config: Settings, runs: Vec<RunResult>, wall_time_s: f64) -> Self {
        let assertions = runs.iter().map(|r| r.assertions.len() + usize::from(r.error.is_some())).sum();
        let failed = runs
            .iter()
            .map(|r| r.assertions.iter().filter(|a| !a.holds).count() + usize::from(r.error.is_some()))
            .sum();
        Self {
            environment: Environment {
                tool: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                seed: config.seed,
            },
            config,
            runs,
            assertions,
            failed,
            passed: failed == 0,
            wall_time_s,
        }
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    let path = dir.join(name);
    File::create(&path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(path.display().to_string(), e))
}

fn cell(v: Option<Real>) -> String {
    match v {
        None => String::new(),
        Some(Real(x)) if x == f64::INFINITY => "inf".to_string(),
        Some(Real(x)) => x.to_string(),
    }
}

/// Writes `report.json`, `report.csv` (`run,p,n,lower,value,upper,ok`) and
/// `plotdata.csv` (`series,x,y`) into `dir`.
pub fn emit(report: &Report, dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.display().to_string(), e))?;
    let io = |name: &str| {
        let path = dir.join(name).display().to_string();
        move |e: std::io::Error| CliError::Io(path, e)
    };

    let mut json = create(dir, "report.json")?;
    serde_json::to_writer_pretty(&mut json, report).map_err(|e| CliError::Config(e.to_string()))?;
    writeln!(json).and_then(|_| json.flush()).map_err(io("report.json"))?;

    let mut csv = csv::Writer::from_writer(create(dir, "report.csv")?);
    csv.write_record(["run", "p", "n", "lower", "value", "upper", "ok"])?;
    for r in &report.runs {
        csv.write_record([
            r.run.clone(),
            cell(r.p),
            r.n.map(|n| n.to_string()).unwrap_or_default(),
            cell(r.lower),
            cell(r.value),
            cell(r.upper),
            r.ok().to_string(),
        ])?;
    }
    csv.flush().map_err(io("report.csv"))?;

    let mut plot = csv::Writer::from_writer(create(dir, "plotdata.csv")?);
    plot.write_record(["series", "x", "y"])?;
    for r in &report.runs {
        for (series, x, y) in &r.series {
            plot.write_record([series.clone(), x.to_string(), y.to_string()])?;
        }
    }
    plot.flush().map_err(io("plotdata.csv"))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Experiment, Settings};

    #[test]
    fn empty_report_has_headers_only() {
        let dir = tempfile::tempdir().unwrap();
        let report = Report::new(Settings::defaults(Experiment::Decompose), vec![], 0.0);
        assert!(report.passed && report.assertions == 0);
        emit(&report, dir.path()).unwrap();
        let read = |f: &str| std::fs::read_to_string(dir.path().join(f)).unwrap();
        assert_eq!(read("report.csv"), "run,p,n,lower,value,upper,ok\n");
        assert_eq!(read("plotdata.csv"), "series,x,y\n");
        let json: serde_json::Value = serde_json::from_str(&read("report.json")).unwrap();
        assert_eq!(json["runs"], serde_json::json!([]));
    }

    #[test]
    fn errored_runs_count_as_failures() {
        let runs = vec![RunResult::failed("x", Some(f64::INFINITY), None, "boom".into())];
        let report = Report::new(Settings::defaults(Experiment::Decompose), runs, 0.0);
        assert_eq!((report.assertions, report.failed, report.passed), (1, 1, false));
        assert_eq!(serde_json::to_value(&report.runs[0]).unwrap()["p"], "inf");
    }
}
