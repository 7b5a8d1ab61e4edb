use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_starmeasure"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("spawn starmeasure")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn builtin(dir: &Path, name: &str, file: &str) {
    let out = run(dir, &["builtin", name, "-o", file]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn uniform_roundtrip_passes() {
    let dir = TempDir::new().unwrap();
    builtin(dir.path(), "uniform", "uniform.csv");
    let out = run(dir.path(), &["roundtrip", "uniform.csv", "--walks", "100000", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert!(report["ks"].as_f64().unwrap() <= 0.01);
    assert_eq!(report["config"]["walk"]["seed"], 7);
    assert_eq!(report["config"]["walk"]["walks"], 100000);
}

#[test]
fn nonmember_is_a_verdict_failure() {
    let dir = TempDir::new().unwrap();
    builtin(dir.path(), "nonmember", "nonmember.csv");
    let out = run(dir.path(), &["check-class-a", "nonmember.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdict"], "not-in-class-a");
}

#[test]
fn zero_walks_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    builtin(dir.path(), "uniform", "uniform.csv");
    let out = run(dir.path(), &["build-domain", "uniform.csv", "-o", "domain.csv"]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(dir.path(), &["project", "domain.csv", "--walks", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("walks"));
}

#[test]
fn input_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(dir.path(), &["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["check-class-a", "missing.csv"]).status.code(), Some(2));
    std::fs::write(dir.path().join("bad.csv"), "t,nu\n0,0\n1,0.5\n0.5,1\n").unwrap();
    let out = run(dir.path(), &["check-class-a", "bad.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    assert_eq!(run(dir.path(), &["matsaev", "--tau", "0.3"]).status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    builtin(dir.path(), "cosine", "cosine.csv");
    run(dir.path(), &["build-domain", "cosine.csv", "-o", "domain.csv"]);
    let args = ["project", "domain.csv", "--walks", "5000", "--seed", "3", "--z", "0.2,-0.1"];
    let a = run(dir.path(), &args);
    let b = run(dir.path(), &args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = run(dir.path(), &[&args[..], &["--workers", "3"]].concat());
    let (ja, jc) = (json(&a), json(&c));
    assert_eq!(ja["distribution"], jc["distribution"]);
}

#[test]
fn reports_echo_configuration() {
    let dir = TempDir::new().unwrap();
    let cases: [&[&str]; 5] = [
        &["theorem1", "--function", "radial-log"],
        &["phragmen", "--t-points", "6"],
        &["levinson", "--x-points", "9"],
        &["matsaev", "--points", "33"],
        &["carleman-identity"],
    ];
    for args in cases {
        let out = run(dir.path(), args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(json(&out)["config"]["command"], args[0]);
    }
}

#[test]
fn csv_format_and_output_file() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["carleman-identity", "--format", "csv", "-o", "c.csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("c.csv")).unwrap();
    assert!(text.starts_with("key,value"));
    assert!(text.contains("residual,"));
}
