use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_orlicz-approx"));
    c.env("ORLICZ_APPROX_LOG", "error");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../configs/{name}.json"))
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("exp.json");
    std::fs::write(&p, text).unwrap();
    p
}

fn field(out: &str, key: &str) -> f64 {
    out.lines()
        .find_map(|l| l.strip_prefix(key))
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or_else(|| panic!("no {key} in {out}"))
}

#[test]
fn norm_of_cosine() {
    let o = run(&["norm", "--function", "harmonic 1", "--young", "power 2", "--weight", "const"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!((field(&out, "luxemburg") - PI.sqrt()).abs() < 1e-9);
    assert!((field(&out, "ratio") - 2.0).abs() < 1e-6);
}

#[test]
fn norm_of_zero_function() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), r#"{"function": {"coeffs": [[0.0, 0.0]]}}"#);
    let o = run(&["norm", "--config", p.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(field(&stdout(&o), "luxemburg"), 0.0);
}

#[test]
fn bad_family_exits_2_with_pointer() {
    let o = run(&["norm", "--function", "harmonic 1", "--young", "powr 2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/space/young"));

    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), r#"{"psi": {"family": "power 1", "betta": 1}}"#);
    let o = run(&["norm", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/psi/betta"));
}

#[test]
fn verify_direct_writes_rows_and_matching_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "verify",
        "--config",
        config("direct_16").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let rep: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("direct_16.json")).unwrap()).unwrap();
    let bounded = rep["verdict"] == "bounded";
    assert_eq!(o.status.code(), Some(if bounded { 0 } else { 1 }));
    let csv = std::fs::read_to_string(dir.path().join("direct_16.csv")).unwrap();
    let ns: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(ns, ["1", "2", "3", "4", "5", "6", "7", "8"]);
}

#[test]
fn verify_bounded_exits_0() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "verify",
        "--config",
        config("bernstein_15").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("bounded"));
}

#[test]
fn hypothesis_failures_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(
        dir.path(),
        r#"{"function": {"family": "harmonic"}, "psi": {"family": "power -1", "beta": 1},
            "run": {"theorem_id": "bernstein_15", "n_range": [1, 4]}}"#,
    );
    let o = run(&["verify", "--config", p.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("psi not in M*"));

    let p = write_config(
        dir.path(),
        r#"{"function": {"family": "poly-decay 4 16"}, "psi": {"family": "exp 1"},
            "run": {"theorem_id": "inverse_21", "n_range": [2, 6]}}"#,
    );
    let o = run(&["verify", "--config", p.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn report_round_trip_has_zero_diffs() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["theoremA_5_6_7", "inverse_21"] {
        run(&["verify", "--config", config(name).to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    }
    for file in ["theoremA_5_6_7.csv", "inverse_21.csv"] {
        let path = dir.path().join(file);
        let o = run(&["report", path.to_str().unwrap()]);
        assert!(o.status.success());
        assert_eq!(stdout(&o), std::fs::read_to_string(&path).unwrap());
    }
}

#[test]
fn seed_determines_random_corpus() {
    let csv = |seed: &str| {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config("bernstein_random");
        run(&["verify", "--config", cfg.to_str().unwrap(), "--seed", seed, "--out", dir.path().to_str().unwrap()]);
        std::fs::read(dir.path().join("bernstein_15.csv")).unwrap()
    };
    assert_eq!(csv("5"), csv("5"));
    assert_ne!(csv("5"), csv("6"));
}

#[test]
fn classify_power_two() {
    let out = stdout(&run(&["classify", "power 2"]));
    for class in ["M* ", "M  ", "M' ", "M0 "] {
        assert!(out.lines().any(|l| l.starts_with(class) && l.ends_with("true")), "{class} in {out}");
    }
}

#[test]
fn ap_of_constant_weight() {
    let out = stdout(&run(&["ap", "const", "2"]));
    assert!((field(&out, "constant") - 1.0).abs() < 1e-9);
    assert!(out.contains("in_ap"));
}

#[test]
fn en_matches_parseval_tails() {
    let o = run(&["en", "10", "--function", "poly-decay 2 8"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let rows: Vec<Vec<String>> = out.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 10);
    for row in rows {
        let n: usize = row[0].parse().unwrap();
        let tail: f64 = (n..=8).map(|k| (k as f64).powi(-4)).sum();
        let e: f64 = row[1].parse().unwrap();
        assert!((e - (PI * tail).sqrt()).abs() <= 1e-5 * (PI * tail).sqrt().max(1e-12), "n = {n}");
    }
}

#[test]
fn psi_derivative_and_integral_invert() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "psi-deriv",
        "--function",
        "alternating 1 4",
        "--psi",
        "power 1.5",
        "--beta",
        "0.5",
        "--format",
        "json",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let d: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("psi_deriv.json")).unwrap()).unwrap();
    assert_eq!(d["coeffs"].as_array().unwrap().len(), 4);

    let p = write_config(
        dir.path(),
        &format!(r#"{{"function": {{"a0_half": 0.0, "coeffs": {}}}}}"#, d["coeffs"]),
    );
    let o = run(&[
        "psi-int", "--config", p.to_str().unwrap(), "--psi", "power 1.5", "--beta", "0.5", "--format", "csv",
    ]);
    let out = stdout(&o);
    let a: Vec<f64> = out.lines().skip(2).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    for (k, v) in a.iter().enumerate() {
        let want = if k % 2 == 0 { 1.0 } else { -1.0 } / (k + 1) as f64;
        assert!((v - want).abs() < 1e-10, "k = {}", k + 1);
    }
}

#[test]
fn modulus_closed_form() {
    let o = run(&["modulus", "1", &(PI / 2.0).to_string(), "--function", "harmonic 1"]);
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - (1.0 - 2.0 / PI) * PI.sqrt()).abs() < 1e-4);
}
