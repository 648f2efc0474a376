use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_paraplex"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn read_report(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn passing_suite_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run(&["verify", "--suite", "products", "--seed", "42", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_report(&out);
    assert_eq!(r["suite"], "products");
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["summary"]["failed"], 0);
}

#[test]
fn failing_checks_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run(&["verify", "--suite", "linespace", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("FAIL linespace.structures.nijenhuis.j2"), "{stderr}");
    assert!(out.exists());
}

#[test]
fn tightened_tolerances_fail() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run(&["verify", "--suite", "topology", "--out", out.to_str().unwrap(), "--tolerance-scale", "1e-30"]);
    assert_eq!(code(&o), 1);
    assert_eq!(read_report(&out)["tolerance_scale"], 1e-30);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let out = out.to_str().unwrap();
    assert_eq!(code(&run(&["verify", "--suite", "bogus", "--out", out])), 2);
    assert_eq!(code(&run(&["verify", "--suite", "pde", "--out", out, "--tolerance-scale", "-1"])), 2);
    assert_eq!(code(&run(&["verify", "--out", out])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    let xi = data("convert/xi-eta.json");
    assert_eq!(code(&run(&["convert", "--kind", "sideways", "--in", xi.to_str().unwrap()])), 2);
    let bad = data("convert/points.json");
    assert_eq!(code(&run(&["convert", "--kind", "xi-eta-to-conformal", "--in", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["curvature", "--geometry", "linespace-G", "--point", "1,2,3"])), 2);
    assert_eq!(code(&run(&["curvature", "--geometry", "linespace-G", "--point", "a,b,c,d"])), 2);
}

#[test]
fn io_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope").join("r.json");
    assert_eq!(code(&run(&["verify", "--suite", "pde", "--out", missing.to_str().unwrap()])), 3);
    let absent = dir.path().join("absent.json");
    assert_eq!(code(&run(&["convert", "--kind", "points-to-pluecker", "--in", absent.to_str().unwrap()])), 3);
    assert_eq!(code(&run(&["curvature", "--geometry", absent.to_str().unwrap(), "--point", "0,0,0,0"])), 3);
}

#[test]
fn convert_kinds() {
    let o = run(&["convert", "--kind", "xi-eta-to-conformal", "--in", data("convert/xi-eta.json").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert!(v["roundtrip_residual"].as_f64().unwrap() < 1e-12);

    let o = run(&["convert", "--kind", "conformal-to-xi-eta", "--in", data("convert/conformal.json").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout_json(&o)["roundtrip_residual"].as_f64().unwrap() < 1e-12);

    let o = run(&["convert", "--kind", "points-to-pluecker", "--in", data("convert/points.json").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["relation"].as_f64().unwrap(), 0.0);
    assert_eq!(v["X"], serde_json::json!([0.0, 0.0, 0.0, 0.0]));

    let o = run(&["convert", "--kind", "pluecker-to-conformal", "--in", data("convert/pluecker.json").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["X"].as_array().unwrap().len(), 4);
}

#[test]
fn outside_hemisphere_is_a_failure() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("in.json");
    std::fs::write(&p, r#"{"xi": [1.5, 0.0], "eta": [0.0, 0.0]}"#).unwrap();
    assert_eq!(code(&run(&["convert", "--kind", "xi-eta-to-conformal", "--in", p.to_str().unwrap()])), 1);
}

#[test]
fn curvature_of_builtins_and_configs() {
    let o = run(&["curvature", "--geometry", "linespace-G", "--point", "0.3,-0.1,0.5,0.2"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert!(v["curvature"]["scalar"].as_f64().unwrap().abs() < 1e-9);
    assert_eq!(v["structures"].as_array().unwrap().len(), 3);

    let o = run(&["curvature", "--geometry", data("bump.json").to_str().unwrap(), "--point", "0.1,0.2,0.3,0.4"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert!(v["curvature"]["scalar"].as_f64().unwrap().abs() > 1e-2);

    let o = run(&["curvature", "--geometry", data("flat-split.json").to_str().unwrap(), "--point", "0,0,0,0"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["curvature"]["riemann_sq"].as_f64().unwrap(), 0.0);
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("r{k}.json"));
        let o = run(&["verify", "--suite", "all", "--seed", "7", "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 1);
        let mut r = read_report(&out);
        r.as_object_mut().unwrap().remove("wall_time_seconds");
        reports.push(r);
    }
    assert_eq!(reports[0], reports[1]);
}
