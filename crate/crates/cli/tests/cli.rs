use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn henon(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_henon")).args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn certify_quadratic_reports_degree_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = henon(
        &["certify", "--function", r#"{"kind":"poly","coefficients":[[0,0],[0,0],[1,0]]}"#, "--delta", "0.5"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = read_json(&dir.path().join("certify.json"));
    assert_eq!(doc["status"], "success");
    assert_eq!(doc["result"]["certificate"]["degree"], 2);
    assert!(dir.path().join("certify.meta.json").exists());
}

#[test]
fn unrich_search_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = henon(&["transition", "--n-max", "3"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let doc = read_json(&dir.path().join("transition.json"));
    assert_eq!(doc["status"], "honest-failure");
    assert_eq!(doc["result"]["structure"]["rich"], false);
}

#[test]
fn transition_reports_lower_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let out = henon(&["transition", "--k", "3"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let doc = read_json(&dir.path().join("transition.json"));
    assert_eq!(doc["result"]["lower_bounds"]["ln_k_minus_2"].as_f64(), Some(0.0));
}

#[test]
fn bad_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(henon(&["frobnicate"], dir.path()).status.code(), Some(1));
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"deltta": 0.5}"#).unwrap();
    assert_eq!(henon(&["certify", "--config", cfg.to_str().unwrap()], dir.path()).status.code(), Some(1));
    assert_eq!(henon(&["periodic", "--itinerary", "1,2"], dir.path()).status.code(), Some(1));
    assert_eq!(henon(&["probe", "--delta", "0"], dir.path()).status.code(), Some(1));
}

#[test]
fn results_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for _ in 0..2 {
        let out = henon(&["periodic", "--delta", "0.5", "--seed-grid", "3"], dir.path());
        assert_eq!(out.status.code(), Some(0));
        runs.push(["periodic.json", "periodic.csv"].map(|name| fs::read(dir.path().join(name)).unwrap()));
    }
    assert!(runs[0] == runs[1]);
}

#[test]
fn lacunary_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = henon(&["lacunary", "--emit-svg"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("lacunary.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    let svg = fs::read_to_string(dir.path().join("lacunary.svg")).unwrap();
    assert!(svg.contains("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn no_csv_flag_suppresses_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = henon(&["probe", "--no-csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("probe.json").exists());
    assert!(!dir.path().join("probe.csv").exists());
}

#[test]
fn config_file_with_relative_function_path() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("f.json"), r#"{"kind":"poly","coefficients":[[0,0],[0,0],[0,0],[1,0]]}"#).unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"function": "f.json", "delta": [0.5, 0.0], "certify": {"radius": 2.0}}"#).unwrap();
    let out = henon(&["certify", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read_json(&dir.path().join("certify.json"))["result"]["certificate"]["degree"], 3);
}
