use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn toephank(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toephank"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn with_config(experiment: &str, config: &str, extra: &[&str], out: &Path) -> Output {
    let path = out.join("config.json");
    std::fs::create_dir_all(out).unwrap();
    std::fs::write(&path, config).unwrap();
    let mut args = vec![experiment, "--config", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    toephank(&args, out)
}

fn report(out: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn decompose_roundtrip_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = toephank(&["decompose", "--sizes", "64"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let r = report(dir.path());
    assert_eq!(r["passed"], true);
    assert!(f(&r["runs"][0]["value"]) <= 1e-12);
}

#[test]
fn norm_sweep_plot_series_follows_eigenvalue_formula() {
    let dir = tempfile::tempdir().unwrap();
    let out = toephank(&["norm_sweep", "--p", "2", "--sizes", "4,16,64"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let plot = std::fs::read_to_string(dir.path().join("plotdata.csv")).unwrap();
    let mut lines = plot.lines();
    assert_eq!(lines.next(), Some("series,x,y"));
    let mut count = 0;
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        let (n, y): (f64, f64) = (cols[1].parse().unwrap(), cols[2].parse().unwrap());
        assert!((y - 2.0 * (std::f64::consts::PI / (n + 1.0)).cos()).abs() <= 1e-12);
        count += 1;
    }
    assert_eq!(count, 3);
}

#[test]
fn sharpness_at_two_collapses_to_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = toephank(&["sharpness", "--p", "2"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let run = &report(dir.path())["runs"][0];
    assert!((f(&run["lower"]) - 1.0).abs() <= 1e-6 && (f(&run["upper"]) - 1.0).abs() <= 1e-6);
}

#[test]
fn hartman_unit_sequence_has_rank_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = with_config("hartman", r#"{"psi": "e1", "sizes": [8, 16, 32]}"#, &[], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r = report(dir.path());
    for run in r["runs"].as_array().unwrap().iter().take(3) {
        assert_eq!(run["details"]["count"], 1);
    }
}

#[test]
fn failed_assertion_sets_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = with_config("hartman", r#"{"psi": "e1", "sizes": [8, 16], "expect": "noncompact"}"#, &[], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(dir.path())["passed"], false);
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(csv.lines().last().unwrap().ends_with(",false"));
}

#[test]
fn sandwich_csv_has_contract_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = toephank(&["sandwich", "--sizes", "32", "--p", "2"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("run,p,n,lower,value,upper,ok"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 7);
    assert_eq!((row[1], row[2], row[6]), ("2", "32", "true"));
    let (lo, v, hi): (f64, f64, f64) = (row[3].parse().unwrap(), row[4].parse().unwrap(), row[5].parse().unwrap());
    assert!(lo <= v && v <= hi);
}

#[test]
fn reruns_are_identical_apart_from_wall_time() {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let out = toephank(&["norm_sweep", "--p", "3,inf", "--sizes", "8,12", "--seed", "7"], dir.path());
        assert_eq!(out.status.code(), Some(0));
        let mut r = report(dir.path());
        r.as_object_mut().unwrap().remove("wall_time_s");
        let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
        (serde_json::to_string(&r).unwrap(), csv)
    };
    assert_eq!(run(), run());
}

#[test]
fn config_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = with_config(
        "norm_sweep",
        r#"{"name": "custom", "sizes": [5], "seed": 3}"#,
        &["--sizes", "4,9", "--seed", "1", "--p", "1"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let r = report(dir.path());
    assert_eq!(r["config"]["name"], "custom");
    assert_eq!(r["config"]["sizes"], serde_json::json!([5]));
    assert_eq!(r["config"]["p"], serde_json::json!([1.0]));
    assert_eq!(r["environment"]["seed"], 3);
}

#[test]
fn inline_and_named_symbols_resolve() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"{
        "symbols": {"shift": {"type": "fourier_poly", "coeffs": {"lo": 1, "values": [[1, 0]]}}},
        "a": "shift",
        "c": {"type": "fourier_poly", "coeffs": {"lo": 0, "values": [[0.5, 0]]}},
        "sizes": [64]
    }"#;
    let out = with_config("flipnorm", config, &[], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    // [[z, 1/2], [1/2, z̄]] has singular values 3/2 and 1/2 on the whole circle
    assert!((f(&report(dir.path())["runs"][0]["upper"]) - 1.5).abs() <= 1e-12);
}

#[test]
fn unusable_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let unresolved = with_config("sandwich", r#"{"a": "nope"}"#, &[], dir.path());
    assert_eq!(unresolved.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unresolved.stderr).contains("symbol 'nope'"));
    let capped = toephank(&["norm_sweep", "--sizes", "9000"], dir.path());
    assert_eq!(capped.status.code(), Some(2));
    let wrong = with_config("sandwich", r#"{"experiment": "cesaro"}"#, &[], dir.path());
    assert_eq!(wrong.status.code(), Some(2));
}

#[test]
fn run_errors_are_recorded_and_others_continue() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"{"psi": {"lo": 1, "values": [[1, 0], [0.5, 0], [0.25, 0], [0.125, 0], [0.0625, 0]], "decay_class": "c0"}, "sizes": [3, 8]}"#;
    let out = with_config("decompose", config, &[], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let r = report(dir.path());
    assert!(r["runs"][0]["error"].is_null());
    assert!(r["runs"][1]["error"].as_str().unwrap().contains("outside the stored window"));
}

#[test]
fn thread_cap_is_honoured_and_validated() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_toephank"))
            .args(["cesaro", "--sizes", "10,20", "--out"])
            .arg(dir.path())
            .env("TOEPHANK_THREADS", threads)
            .output()
            .unwrap()
    };
    assert_eq!(run("1").status.code(), Some(0));
    assert_eq!(run("zero").status.code(), Some(2));
}
