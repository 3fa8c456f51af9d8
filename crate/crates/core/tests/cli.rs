use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn dgsymp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dgsymp")).args(args).env_remove("DGSYMP_PRETTY").output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

const TRUNC: [&str; 6] = ["--window", "-4..1", "--max-polydeg", "4", "--max-weight", "6"];

fn with_trunc<'a>(args: &[&'a str]) -> Vec<&'a str> {
    args.iter().copied().chain(TRUNC).collect()
}

#[test]
fn check_accepts_a_valid_file() {
    let out = dgsymp(&["check", fixture("critical.dga").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema_version"], "dgsymp-report/1");
    assert_eq!(v["presentation"], "field Q;\ngen x : 0;\ngen y : -1;\nD y = x^2;\n");
}

#[test]
fn forward_reference_exits_with_two() {
    let dir = std::env::temp_dir().join("dgsymp-cli-forward");
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("forward.dga");
    std::fs::write(&file, "field Q; gen y : -1; D y = x^2; gen x : 0;").unwrap();
    let out = dgsymp(&["check", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("forward reference"));
}

#[test]
fn missing_truncation_is_a_usage_error() {
    let f = fixture("critical.dga");
    let out = dgsymp(&["cohomology", f.to_str().unwrap(), "--window", "-2..0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zero_form_fails_nondegeneracy() {
    let f = fixture("critical.dga");
    let out = dgsymp(&with_trunc(&["verify-symplectic", f.to_str().unwrap(), "--omega", "0", "--d", "1", "--max-wedge", "3"]));
    assert_eq!(out.status.code(), Some(1));
    let checks = json(&out)["report"]["checks"].as_array().unwrap().clone();
    let nd = checks.iter().find(|c| c["name"] == "nondegenerate").unwrap();
    assert_eq!(nd["pass"], false);
}

#[test]
fn darboux_reports_the_cubic_potential() {
    let (f, w) = (fixture("critical.dga"), fixture("critical.witness"));
    let args = with_trunc(&[
        "darboux",
        f.to_str().unwrap(),
        "--omega",
        "d(y)^d(x)",
        "--d",
        "1",
        "--witness",
        w.to_str().unwrap(),
        "--max-wedge",
        "3",
    ]);
    let out = dgsymp(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["f"], "1/3*x^3");
    assert_eq!(v["base"], "field Q;\ngen x : 0;\n");
    // byte-stable across runs
    assert_eq!(out.stdout, dgsymp(&args).stdout);
}

#[test]
fn surgery_exchanges_on_the_double_point() {
    let f = fixture("double-point.dga");
    let shifted = dgsymp(&with_trunc(&["shifted-cotangent", f.to_str().unwrap(), "--d", "1"]));
    assert_eq!(shifted.status.code(), Some(0));
    let v = json(&shifted);
    let dir = std::env::temp_dir().join("dgsymp-cli-surgery");
    std::fs::create_dir_all(&dir).unwrap();
    let a = dir.join("tstar.dga");
    std::fs::write(&a, v["presentation"].as_str().unwrap()).unwrap();
    let omega = v["omega"].as_str().unwrap();
    let w = fixture("cotangent.witness");
    let out = dgsymp(&with_trunc(&[
        "surgery",
        a.to_str().unwrap(),
        "--omega",
        omega,
        "--d",
        "1",
        "--witness",
        w.to_str().unwrap(),
        "--max-wedge",
        "3",
    ]));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let s = json(&out);
    assert_eq!(s["steps"].as_array().unwrap().len(), 1);
    assert_eq!(s["steps"][0]["removed"], "d(z)");
}

#[test]
fn localize_adjoins_an_inverse() {
    let f = fixture("critical.dga");
    let out = dgsymp(&["localize", f.to_str().unwrap(), "--at", "x"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["presentation"].as_str().unwrap().contains("D xi = x*t - 1;"));
}

#[test]
fn tor_amplitude_of_a_two_term_complex() {
    let (f, m) = (fixture("double-point.dga"), fixture("two-term.mod"));
    let out = dgsymp(&["tor-amplitude", f.to_str().unwrap(), "--module", m.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["amplitude"], serde_json::json!([-1, 0]));
}

#[test]
fn twist_builds_the_critical_locus() {
    let dir = std::env::temp_dir().join("dgsymp-cli-twist");
    std::fs::create_dir_all(&dir).unwrap();
    let (b, m) = (dir.join("line.dga"), dir.join("fibre.mod"));
    std::fs::write(&b, "field Q; gen x : 0;").unwrap();
    std::fs::write(&m, "module over B { basis y : -1; }").unwrap();
    let out = dgsymp(&["twist", b.to_str().unwrap(), "--module", m.to_str().unwrap(), "--xi", "x^2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(json(&out)["presentation"].as_str().unwrap().contains("D y = x^2;"));
}

#[test]
fn derham_and_cotangent_and_cohomology_run() {
    let f = fixture("critical.dga");
    let f = f.to_str().unwrap();
    let d = json(&dgsymp(&["derham", f, "--form", "x*d(y)", "--max-wedge", "3"]));
    assert_eq!(d["closed"], false);
    let c = json(&dgsymp(&["cotangent", f]));
    assert_eq!(c["module"]["basis"].as_array().unwrap().len(), 2);
    let h = json(&dgsymp(&["cohomology", f, "--window", "-1..0", "--max-polydeg", "3", "--max-weight", "6"]));
    assert_eq!(h["dims"]["0"], 2);
}
