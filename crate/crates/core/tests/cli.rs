//! The `depapprox` binary: output formats and exit statuses.

use std::process::{Command, Output};

fn depapprox(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_depapprox")).args(args).output().expect("spawn depapprox")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const TWO_RUNS_SMALL: &str = r#"{"kind":"two_runs","n":2,"p":0.5}"#;
const TWO_RUNS: &str = r#"{"kind":"two_runs","n":1000,"p":0.05}"#;

#[test]
fn dist_prints_exact_pmf() {
    let o = depapprox(&["dist", "--model", TWO_RUNS_SMALL]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,probability"));
    let pmf: Vec<(i64, f64)> = lines
        .map(|l| {
            let (k, w) = l.split_once(',').unwrap();
            (k.parse().unwrap(), w.parse().unwrap())
        })
        .collect();
    assert_eq!(pmf, vec![(0, 0.625), (1, 0.25), (2, 0.125)]);
}

#[test]
fn cumulants_json() {
    let o = depapprox(&["cumulants", "--model", TWO_RUNS]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let g1 = v["cumulants"]["gamma1"].as_f64().unwrap();
    assert!((g1 - 2.5).abs() < 1e-12);
    assert_eq!(v["cumulants"]["flags"]["nu12"], serde_json::Value::Bool(true));
    assert_eq!(v["model"]["kind"], "two_runs");
}

#[test]
fn model_from_file_and_output_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.json");
    let out = dir.path().join("dist.csv");
    std::fs::write(&model, TWO_RUNS_SMALL).unwrap();
    let o = depapprox(&["dist", "--model", model.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(&out).unwrap().starts_with("k,probability\n0,6.25"));
}

#[test]
fn approx_lists_requested_kinds() {
    let o = depapprox(&["approx", "--model", TWO_RUNS, "--kinds", "nb,g+"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let list = v.as_array().unwrap();
    assert_eq!(list.len(), 2);
    assert_eq!(list[0]["kind"], "neg_binomial");
    let mass: f64 = list[0]["weights"].as_array().unwrap().iter().map(|w| w.as_f64().unwrap()).sum();
    assert!((mass - 1.0).abs() < 1e-11);
}

#[test]
fn degenerate_nb_falls_back_to_poisson() {
    // ν₂ = ν₁² per summand, so Γ₂ = 0 exactly.
    let model = r#"{"kind":"independent","n":10,"pmf":[0.625,0.25,0.125]}"#;
    let o = depapprox(&["approx", "--model", model, "--kinds", "nb"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["kind"], "pois");
    assert!(v[0]["warning"].as_str().unwrap().contains("nb"));
}

#[test]
fn smoothing_a10_has_no_violations() {
    let o = depapprox(&["smoothing", "--lemma", "a10"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("experiment,n,p,k1,k2,m,kind,norm,lhs,rate_value,ratio,flags\n"));
}

#[test]
fn sharp_and_bergstrom_reports() {
    let o = depapprox(&["sharp", "--experiment", "bi_k1k2_tv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l.contains(",constant:bi_k1k2_tv,")));

    let model = r#"{"kind":"two_runs","n":100,"p":0.02}"#;
    let o = depapprox(&["bergstrom", "--model", model, "--order", "2", "--base", "g", "--depth", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().filter(|l| l.contains("brg_s")).count(), 3);
}

#[test]
fn rates_outside_regime_exit_3() {
    let model = r#"{"kind":"two_runs","n":10,"p":0.5}"#;
    let o = depapprox(&["rates", "--model", model, "--kinds", "g", "--grid", "100,200,400"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("skipped:conditions"));
}

#[test]
fn argument_errors_exit_2() {
    assert_eq!(depapprox(&["dist", "--model", "{not json"]).status.code(), Some(2));
    assert_eq!(depapprox(&["dist", "--model", r#"{"kind":"two_runs","n":5,"p":1.5}"#]).status.code(), Some(2));
    assert_eq!(depapprox(&["approx", "--model", TWO_RUNS, "--kinds", "zeta"]).status.code(), Some(2));
    assert_eq!(depapprox(&["sharp", "--experiment", "nope"]).status.code(), Some(2));
    assert_eq!(depapprox(&["dist"]).status.code(), Some(2));
    assert_eq!(depapprox(&["bergstrom", "--model", TWO_RUNS, "--depth", "0"]).status.code(), Some(2));
    let o = depapprox(&["approx", "--model", TWO_RUNS, "--kinds", "bi"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}

#[test]
fn resource_errors_exit_4() {
    let model = r#"{"kind":"k1k2","n":100,"k1":7,"k2":7,"p":0.5}"#;
    assert_eq!(depapprox(&["dist", "--model", model]).status.code(), Some(4));
    let o = Command::new(env!("CARGO_BIN_EXE_depapprox"))
        .args(["dist", "--model", r#"{"kind":"two_runs","n":500,"p":0.5}"#])
        .env("DEPAPPROX_MAX_SUPPORT", "50")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(depapprox(&["--help"]).status.code(), Some(0));
    assert_eq!(depapprox(&["--version"]).status.code(), Some(0));
}
