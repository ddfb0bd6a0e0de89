use std::process::{Command, Output};

use ffprog::experiments::SweepReport;
use ffprog::field::make_field;
use ffprog::harmonic::FpFunction;

fn ffprog(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffprog"))
        .args(args)
        .env_remove("FFPROG_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn counterexample_line() {
    let out = ffprog(&["counterexample", "--p", "7", "--a", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "lhs=1.000000000 rhs=0.000000000\n");
}

#[test]
fn composite_modulus_is_a_usage_error() {
    let out = ffprog(&["weil", "--p", "4", "--points", "0,1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("4 is not prime"));
}

#[test]
fn help_and_bad_flags() {
    assert_eq!(ffprog(&["--help"]).status.code(), Some(0));
    assert_eq!(ffprog(&["discorrelate"]).status.code(), Some(1));
    assert_eq!(ffprog(&["counterexample", "--p", "7", "--format", "xml"]).status.code(), Some(1));
    assert_eq!(ffprog(&["counterexample", "--p", "7", "--a", "0"]).status.code(), Some(1));
}

#[test]
fn invalid_spec_reports_witness() {
    let out = ffprog(&["discorrelate", "--spec", "m=3;P=y^2", "--primes", "11", "--trials", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("[1]"));
    let out = ffprog(&["discorrelate", "--spec", "m=;P=y"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("offset 2"));
}

#[test]
fn discorrelate_json_and_csv() {
    let args = ["discorrelate", "--spec", "m=3;P=y^3,y^4", "--primes", "101,211,401", "--family", "random-unimodular", "--trials", "10", "--seed", "7"];
    let json = ffprog(&[&args[..], &["--format", "json"]].concat());
    assert_eq!(json.status.code(), Some(0));
    let report: SweepReport = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(report.rows.len(), 6);
    assert!(report.rows.iter().all(|r| r.seed == 7 && r.trials == 10));
    assert!(report.fit.is_some());
    let value: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    let keys: Vec<&String> = value["rows"][0].as_object().unwrap().keys().collect();
    assert_eq!(keys.len(), 5);

    let csv = ffprog(&[&args[..], &["--format", "csv"]].concat());
    assert_eq!(csv.status.code(), Some(0));
    let text = stdout(&csv);
    assert_eq!(text.lines().count(), report.rows.len() + 1);
    assert_eq!(text.lines().next().unwrap(), "p,stat,value,trials,seed");
    assert_eq!(text, report.to_csv());
}

#[test]
fn output_file_and_budget_env() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = ffprog(&["restricted-ap", "--primes", "11,13", "--trials", "2", "--format", "json", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report = SweepReport::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report.rows.len(), 4);

    let out = Command::new(env!("CARGO_BIN_EXE_ffprog"))
        .args(["discorrelate", "--spec", "m=3;P=y^3,y^4", "--primes", "101", "--trials", "5"])
        .env("FFPROG_BUDGET", "1000")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
    let out = Command::new(env!("CARGO_BIN_EXE_ffprog"))
        .args(["counterexample", "--p", "7"])
        .env("FFPROG_BUDGET", "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn fixtures_for_gowers_and_lambda() {
    let dir = tempfile::tempdir().unwrap();
    let ctx = make_field(11).unwrap();
    let one = dir.path().join("one.json");
    let chi = dir.path().join("chi.json");
    std::fs::write(&one, FpFunction::one(ctx.clone()).to_json_string()).unwrap();
    std::fs::write(&chi, FpFunction::additive_character(ctx, 3).to_json_string()).unwrap();

    let out = ffprog(&["gowers", "--fixture", chi.to_str().unwrap(), "--s", "2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["norm"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let out = ffprog(&["gowers", "--fixture", chi.to_str().unwrap(), "--s", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["norm"].as_f64().unwrap() < 1e-9);

    let fixtures = [one.to_str().unwrap(), one.to_str().unwrap(), one.to_str().unwrap(), one.to_str().unwrap()].join(",");
    let out = ffprog(&["lambda", "--spec", "m=3;P=y^3", "--fixtures", &fixtures, "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "spec,p,re,im,modulus\nm=3;P=y^3,11,1.0,0.0,1.0\n");
    let out = ffprog(&["lambda", "--spec", "m=3;P=y^3", "--fixtures", one.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let out = ffprog(&["gowers", "--fixture", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn search_and_chardecay() {
    let out = ffprog(&["search", "--p", "5", "--spec", "m=3", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["size"], 2);
    assert_eq!(v["set"], serde_json::json!([0, 1]));
    let greedy = ffprog(&["search", "--p", "29", "--spec", "m=3", "--method", "greedy", "--seed", "3"]);
    assert_eq!(greedy.status.code(), Some(0));
    assert_eq!(stdout(&greedy), stdout(&ffprog(&["search", "--p", "29", "--spec", "m=3", "--method", "greedy", "--seed", "3"])));
    assert_eq!(ffprog(&["search", "--p", "37", "--spec", "m=3"]).status.code(), Some(1));

    let out = ffprog(&["chardecay", "--primes", "101", "--s", "3", "--k", "2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 4);
}
