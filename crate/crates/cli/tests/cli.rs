use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const G: &str = r#"{"coefficients":[-1,3,-1],"orientation":"weight"}"#;
const F4: &str = r#"{"coefficients":[1,3,1],"orientation":"oscillator"}"#;
const BOSON: &str = r#"{"coefficients":[1,1],"orientation":"oscillator"}"#;
const SPIN: &str = r#"{"coefficients":[-1,1],"orientation":"weight"}"#;

fn gjs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gjs"))
        .args(args)
        .env_remove("GJS_DIVERGENCE_BOUND")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = [
        "jsmap", "build", "--fn", F4, "--alpha0", "-1.2", "--gn", G, "--alphaj", "1.2", "--j",
        "3/2",
    ];
    let a = gjs(&args);
    let b = gjs(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn invalid_input_exits_1() {
    let bad_fn = gjs(&["charfun", "analyze", "--fn", "{\"coefficients\":[1]}"]);
    assert_eq!(bad_fn.status.code(), Some(1));
    let wrong_orientation = gjs(&["gha", "build", "--fn", G, "--alpha0", "0", "--dim", "3"]);
    assert_eq!(wrong_orientation.status.code(), Some(1));
    let outside = gjs(&["gha", "build", "--fn", F4, "--alpha0", "-2", "--dim", "3"]);
    assert_eq!(outside.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&outside.stderr);
    assert!(stderr.contains("error"), "{stderr}");
    let bad_j = gjs(&[
        "jsmap", "build", "--fn", BOSON, "--alpha0", "0", "--gn", SPIN, "--alphaj", "1", "--j",
        "1/3",
    ]);
    assert_eq!(bad_j.status.code(), Some(1));
    let bad_target = gjs(&[
        "gha",
        "build",
        "--fn",
        BOSON,
        "--alpha0",
        "0",
        "--dim",
        "2",
        "--perturb",
        "Q:0:0:1",
    ]);
    assert_eq!(bad_target.status.code(), Some(1));
}

#[test]
fn help_exits_0() {
    for args in [
        &["--help"][..],
        &["gsl2", "cut", "--help"],
        &["orbit", "figure", "--help"],
    ] {
        let out = gjs(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stdout).contains("Usage"));
    }
}

#[test]
fn gha_files_and_verification() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gha");
    let v = json(&gjs(&[
        "gha",
        "build",
        "--fn",
        F4,
        "--alpha0",
        "-0.15",
        "--dim",
        "4",
        "--verify",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(v["report"]["passed"], true);
    assert_eq!(v["rep"]["ladder"][0], 0.85);
    let csv = std::fs::read_to_string(out.join("Adag.csv")).unwrap();
    assert!(!csv.contains('\r'));
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.lines().nth(2).unwrap().starts_with("|1>,0.85,"));
    assert_eq!(read_json(&out.join("result.json")), v);
    for f in ["H.csv", "A.csv", "casimir.csv"] {
        assert!(out.join(f).exists());
    }
}

#[test]
fn gsl2_build_and_periodic() {
    let v = json(&gjs(&[
        "gsl2", "build", "--gn", G, "--alphaj", "1", "--dim", "1", "--kind", "periodic", "--verify",
    ]));
    assert_eq!(v["rep"]["weights"], serde_json::json!([1.0]));
    assert_eq!(v["report"]["passed"], true);
    let v = json(&gjs(&["gsl2", "periodic", "--gn", G, "--d", "1"]));
    assert_eq!(v["roots"], serde_json::json!([1.0]));
    let unitary = gjs(&[
        "gsl2",
        "build",
        "--gn",
        G,
        "--alphaj",
        "-0.05",
        "--dim",
        "3",
        "--kind",
        "truncated",
    ]);
    assert_eq!(unitary.status.code(), Some(1));
}

#[test]
fn full_grid_map() {
    let v = json(&gjs(&[
        "jsmap",
        "verify",
        "--fn",
        F4,
        "--alpha0",
        "-1.2",
        "--gn",
        G,
        "--alphaj",
        "1.2",
        "--j",
        "1",
        "--full-grid",
        "4",
    ]));
    assert_eq!(v["passed"], true);
    assert_eq!(v["kind"], "truncated");
    let b = json(&gjs(&[
        "jsmap",
        "build",
        "--fn",
        F4,
        "--alpha0",
        "-1.2",
        "--gn",
        G,
        "--alphaj",
        "1.2",
        "--j",
        "1",
        "--full-grid",
        "3",
    ]));
    assert_eq!(b["basis"].as_array().unwrap().len(), 9);
    assert_eq!(b["mode"]["mode"], "full_grid");
}

#[test]
fn pairing_derives_partner() {
    let v = json(&gjs(&[
        "jsmap", "pairing", "--fn", F4, "--alpha0", "-0.15", "--mmax", "10", "--tol", "1e-10",
    ]));
    assert_eq!(
        v["gn"]["coefficients"],
        serde_json::json!([-1.0, 3.0, -1.0])
    );
    assert_eq!(v["gn"]["orientation"], "weight");
    assert_eq!(v["alpha_j"], 0.15);
    assert_eq!(v["report"]["passed"], true);
}

#[test]
fn fig4_mirrored_csv_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let v = json(&gjs(&["orbit", "figure", "--name", "fig4", "--out", out]));
    assert_eq!(v.as_array().unwrap().len(), 2);
    for stem in ["fig4_f", "fig4_g"] {
        for suffix in ["_curve.csv", "_cobweb.csv", ".json"] {
            assert!(
                dir.path().join(format!("{stem}{suffix}")).exists(),
                "{stem}{suffix}"
            );
        }
    }
    let f = read_json(&dir.path().join("fig4_f.json"));
    let g = read_json(&dir.path().join("fig4_g.json"));
    let (fi, gi) = (
        f["iterates"].as_array().unwrap(),
        g["iterates"].as_array().unwrap(),
    );
    assert_eq!(fi.len(), gi.len());
    for (x, y) in fi.iter().zip(gi) {
        let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
        assert!((x + y).abs() <= 1e-12 * x.abs().max(1.0));
    }
}

#[test]
fn fig3_lands_on_guide_line() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&gjs(&[
        "orbit",
        "figure",
        "--name",
        "fig3",
        "--out",
        dir.path().to_str().unwrap(),
    ]));
    let cut = v[0]["guide_lines"][0]["value"].as_f64().unwrap();
    assert!((cut + 1.33479).abs() < 1e-4);
    assert!((v[0]["last_iterate"].as_f64().unwrap() - cut).abs() < 1e-9);
    assert_eq!(v[0]["steps"], 2);
}

#[test]
fn divergence_bound_from_environment() {
    let args = [
        "orbit", "cobweb", "--fn", G, "--x0", "-0.05", "--steps", "40",
    ];
    let default = json(&gjs(&args));
    let limited = Command::new(env!("CARGO_BIN_EXE_gjs"))
        .args(args)
        .env("GJS_DIVERGENCE_BOUND", "100")
        .output()
        .unwrap();
    let limited = json(&limited);
    let n_default = default["iterates"].as_array().unwrap().len();
    let n_limited = limited["iterates"].as_array().unwrap().len();
    assert!(n_limited < n_default);
    assert!(limited["iterates"]
        .as_array()
        .unwrap()
        .iter()
        .all(|x| x.as_f64().unwrap().abs() <= 100.0));
    assert_eq!(limited["diverged"], true);

    let bad = Command::new(env!("CARGO_BIN_EXE_gjs"))
        .args(args)
        .env("GJS_DIVERGENCE_BOUND", "-1")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

fn write_config(dir: &Path, jobs: Value) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::json!({ "jobs": jobs }).to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn batch_runs_and_writes_every_job() {
    let dir = tempfile::tempdir().unwrap();
    let g: Value = serde_json::from_str(G).unwrap();
    let config = write_config(
        dir.path(),
        serde_json::json!([
            {"command": "gsl2 cut", "params": {"gn": g, "d": 2}, "out": "cut"},
            {"command": "orbit figure", "params": {"name": "fig1"}, "out": "fig1"},
            {"command": "jsmap verify",
             "params": {"fn": serde_json::from_str::<Value>(BOSON).unwrap(), "alpha0": 0,
                        "gn": serde_json::from_str::<Value>(SPIN).unwrap(), "alphaj": 1.5, "j": "3/2"},
             "out": "spin"}
        ]),
    );
    let out = gjs(&["run", "--config", &config]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let cut = read_json(&dir.path().join("cut/result.json"));
    assert!((cut["included"][0].as_f64().unwrap() - 0.33479).abs() < 1e-4);
    assert!(dir.path().join("fig1/fig1_a_cobweb.csv").exists());
    assert_eq!(
        read_json(&dir.path().join("spin/result.json"))["passed"],
        true
    );
    let summary: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary[2]["verified"], true);
}

#[test]
fn batch_is_all_or_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let g: Value = serde_json::from_str(G).unwrap();
    // the second job fails at run time (vacuum outside the region)
    let config = write_config(
        dir.path(),
        serde_json::json!([
            {"command": "gsl2 cut", "params": {"gn": g, "d": 2}, "out": "cut"},
            {"command": "gha build",
             "params": {"fn": serde_json::from_str::<Value>(F4).unwrap(), "alpha0": -3, "dim": 2},
             "out": "gha"}
        ]),
    );
    let out = gjs(&["run", "--config", &config]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!dir.path().join("cut").exists());
    assert!(!dir.path().join("gha").exists());

    // duplicate output directories are rejected before anything runs
    let config = write_config(
        dir.path(),
        serde_json::json!([
            {"command": "gsl2 cut", "params": {"gn": g, "d": 2}, "out": "same"},
            {"command": "gsl2 cut", "params": {"gn": g, "d": 3}, "out": "same"}
        ]),
    );
    let out = gjs(&["run", "--config", &config]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!dir.path().join("same").exists());

    // schema errors too
    let config = write_config(
        dir.path(),
        serde_json::json!([{"command": "gsl2 cut", "params": {"gn": g, "dee": 2}, "out": "x"}]),
    );
    assert_eq!(gjs(&["run", "--config", &config]).status.code(), Some(1));
}

#[test]
fn batch_verification_failure_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        serde_json::json!([{
            "command": "gha build",
            "params": {"fn": serde_json::from_str::<Value>(BOSON).unwrap(), "alpha0": 0, "dim": 3,
                       "verify": true, "perturb": "A:0:1:0.01"},
            "out": "gha"
        }]),
    );
    let out = gjs(&["run", "--config", &config]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(
        read_json(&dir.path().join("gha/result.json"))["report"]["passed"],
        false
    );
}
