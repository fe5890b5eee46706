use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

/// Runs the binary and returns (exit code, stdout, stderr).
fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_homgeo")).args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let (code, stdout, _) = run(args);
    (code, serde_json::from_str(&stdout).expect("stdout is a JSON report"))
}

#[test]
fn validate_heisenberg_passes() {
    let (code, r) = run_json(&["validate", &fixture("heisenberg.toml")]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["passed"], true);
    assert_eq!(r["results"]["reductive"]["dim_m"], 3);
}

#[test]
fn validate_names_the_jacobi_triple() {
    let (code, r) = run_json(&["validate", &fixture("jacobi_violation.toml")]);
    assert_eq!(code, 1);
    assert_eq!(r["results"]["jacobi"]["worst_triple"], "(e1, e2, e3)");
    assert_eq!(r["error"]["path"], "brackets");
}

#[test]
fn validate_rejects_zero_kropina_drift() {
    let (code, stdout, stderr) = run(&["validate", &fixture("kropina_zero_drift.toml")]);
    assert_eq!(code, 1);
    assert!(stderr.contains("X must be nonzero"));
    assert!(stdout.contains("X must be nonzero"));
}

#[test]
fn validate_other_fixtures() {
    for f in ["abelian.toml", "hyperbolic.toml", "milnor_d17.json", "randers_alphabeta.toml", "navigation.toml", "so3_kropina.toml"] {
        let (code, _) = run_json(&["validate", &fixture(f)]);
        assert_eq!(code, 0, "{f}");
    }
    let (code, r) = run_json(&["validate", &fixture("u2_isotropy.toml")]);
    assert_eq!(code, 1);
    assert_eq!(r["error"]["kind"], "InvariantVectorViolation");
}

#[test]
fn check_verdicts() {
    let (code, r) = run_json(&["check", &fixture("abelian.toml"), "--y", "0.3,-1,2"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["verdict"], "geodesic");

    let (code, r) = run_json(&["check", &fixture("hyperbolic.toml"), "--y", "0,1,0"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["verdict"], "not_geodesic");
    assert_eq!(r["results"]["residuals"][0].as_f64(), Some(-1.0));

    let (code, r) = run_json(&["check", &fixture("abelian_kropina.toml"), "--y", "-1,0.5"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["verdict"], "outside_domain");
}

#[test]
fn check_rejects_bad_vector() {
    let (code, _, _) = run(&["check", &fixture("abelian.toml"), "--y", "1,2"]);
    assert_eq!(code, 1);
    let (code, _, _) = run(&["check", &fixture("abelian.toml"), "--y", "1,x,2"]);
    assert_eq!(code, 1);
}

#[test]
fn find_examples() {
    let axes = |f: &str| {
        let (code, r) = run_json(&["find", &fixture(f), "--samples", "2000"]);
        assert_eq!(code, 0);
        (r["results"]["axes"].as_array().unwrap().len(), r["results"]["manifold_detected"].as_bool().unwrap())
    };
    assert_eq!(axes("milnor_d17.json"), (3, false));
    assert_eq!(axes("hyperbolic.toml"), (1, false));
    assert!(axes("abelian.toml").1);
}

#[test]
fn exist_heisenberg() {
    let (code, r) = run_json(&["exist", &fixture("heisenberg_kropina.toml")]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["case"], "RadEqualsM");
    assert!(r["results"]["residual"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn exist_writes_curve() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("curve.csv");
    let (code, r) = run_json(&["exist", &fixture("so3_kropina.toml"), "--curve", csv.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["case"], "EigenSplit_General");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,M,domain_flag"));
    let zero = lines.find(|l| l.starts_with("0.0000000000000000e0,")).expect("row at t = 0");
    assert_eq!(zero, "0.0000000000000000e0,-1.0000000000000000e0,0");
}

#[test]
fn exist_rejects_noninvariant_drift() {
    let (code, r) = run_json(&["exist", &fixture("u2_isotropy.toml")]);
    assert_eq!(code, 1);
    assert_eq!(r["error"]["kind"], "InvariantVectorViolation");
}

#[test]
fn exist_needs_kropina() {
    let (code, _, _) = run(&["exist", &fixture("heisenberg.toml")]);
    assert_eq!(code, 1);
}

#[test]
fn mcurve_csv() {
    let (code, stdout, _) = run(&["mcurve", &fixture("so3_kropina.toml"), "--format", "csv", "--t-min", "-0.1", "--t-max", "0.1", "--points", "3"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = stdout.split('\n').collect();
    assert_eq!(lines[0], "t,M,domain_flag");
    assert_eq!(lines[2], "0.0000000000000000e0,-1.0000000000000000e0,0");
    assert_eq!(lines.len(), 5);
}

#[test]
fn csv_only_for_curves() {
    let (code, _, _) = run(&["check", &fixture("abelian.toml"), "--y", "1,0,0", "--format", "csv"]);
    assert_eq!(code, 1);
}

#[test]
fn classify3d_examples() {
    let (code, r) = run_json(&["classify3d", "--alpha", "1", "--beta", "0", "--gamma", "0", "--delta", "1", "--samples", "2000"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["found"], 1);
    assert_eq!(r["results"]["ricci_distinct"], false);

    let (code, r) = run_json(&["classify3d", "--alpha", "2", "--beta", "2", "--gamma", "1", "--delta", "-1", "--samples", "2000"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["found"], 3);
    assert_eq!(r["results"]["match"], true);

    let beta = 32f64.sqrt().to_string();
    let gamma = (-2.0 * 2f64.sqrt()).to_string();
    let (code, r) = run_json(&["classify3d", "--alpha", "2", "--beta", &beta, "--gamma", &gamma, "--delta", "1", "--samples", "2000"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["found"], 2);
    assert_eq!(r["results"]["pattern"]["mutually_orthogonal"], true);

    let (code, _, stderr) = run(&["classify3d", "--alpha", "1", "--beta", "0", "--gamma", "0", "--delta", "-1"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("alpha + delta"));
}

#[test]
fn classify3d_douglas_randers() {
    let (code, r) = run_json(&[
        "classify3d", "--alpha", "2", "--beta", "2", "--gamma", "1", "--delta", "-1", "--metric", "randers", "--x", "0.5,0,0",
        "--samples", "2000",
    ]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["found"], 3);
}

#[test]
fn output_flag_and_digest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let (code, stdout, _) = run(&["validate", &fixture("heisenberg.toml"), "--output", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(r["input_digest"].as_str().unwrap().starts_with("sha256:"));
    assert!(r.get("timings").is_none());
}

#[test]
fn missing_file_is_a_validation_error() {
    let (code, _, _) = run(&["validate", "/nonexistent/instance.toml"]);
    assert_eq!(code, 1);
}

#[test]
fn reports_are_byte_identical() {
    let commands: Vec<Vec<String>> = vec![
        vec!["find".into(), fixture("milnor_d17.json"), "--samples".into(), "500".into(), "--seed".into(), "7".into()],
        vec!["exist".into(), fixture("so3_kropina.toml")],
        vec!["classify3d".into(), "--alpha".into(), "2".into(), "--beta".into(), "2".into(), "--gamma".into(), "1".into(), "--delta".into(), "-1".into(), "--samples".into(), "500".into()],
    ];
    for c in commands {
        let args: Vec<&str> = c.iter().map(String::as_str).collect();
        let (a, b) = (run(&args), run(&args));
        assert_eq!(a.0, 0);
        assert_eq!(a.1, b.1, "{}", c[0]);
    }
}
