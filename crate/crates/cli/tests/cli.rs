use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn conesys(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conesys")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const PERTURBED: &str = r#"{"name":"perturbed","base":{"name":"octagon","side":1.0},
  "kites":[{"vertex":0,"direction":0.3,"length":0.3,"a":0.15,"h":0.02}]}"#;

#[test]
fn torus_systole_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("t.cfs");
    assert!(conesys(&["gen", "torus", "--out", path(&f)]).status.success());
    let out = conesys(&["systole", path(&f)]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["systole"], 1.0);
    assert_eq!(v["schema"], 1);
}

#[test]
fn bounds_table_for_genus_two() {
    let v = json(&conesys(&["bounds", "--genus", "2"]));
    let b = conesys::bounds::bounds(2).unwrap();
    assert_eq!(v["q"].as_u64().unwrap() as u128, b.q);
    assert_eq!(v["n0"].as_u64().unwrap() as u128, b.n0);
    assert_eq!(v["x"], 24);
}

#[test]
fn usage_and_domain_errors() {
    assert_eq!(conesys(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(conesys(&["bounds"]).status.code(), Some(2));
    let out = conesys(&["bounds", "--genus", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "invalid_argument");
    assert_eq!(conesys(&["info", "/no/such/file.cfs"]).status.code(), Some(1));
}

#[test]
fn invalid_surface_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.cfs");
    std::fs::write(&f, "cfs 1\nt 0 1 1 1\n").unwrap();
    let out = conesys(&["validate", path(&f)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unglued"));
}

#[test]
fn excision_output_revalidates() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    let f = dir.path().join("p.cfs");
    let g = dir.path().join("e.cfs");
    std::fs::write(&spec, PERTURBED).unwrap();
    assert!(conesys(&["gen", "--spec", path(&spec), "--out", path(&f)]).status.success());
    let info = json(&conesys(&["info", path(&f)]));
    let small: Vec<String> = info["singularities"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["kind"] == "small")
        .map(|c| c["vertex"].to_string())
        .collect();
    assert_eq!(small.len(), 2);
    let out = conesys(&["excise", path(&f), "--p", &small[0], "--q", &small[1], "--kind", "exact", "--width", "0.001", "--out", path(&g)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["valid"], true);
    assert!(r["removed_area"].as_f64().unwrap() > 0.0);
    let v = json(&conesys(&["validate", path(&g)]));
    assert_eq!(v["valid"], true);
    assert_eq!(v["genus"], 2);
}

#[test]
fn optimize_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    let f = dir.path().join("p.cfs");
    std::fs::write(&spec, PERTURBED).unwrap();
    assert!(conesys(&["gen", "--spec", path(&spec), "--out", path(&f)]).status.success());
    let mut runs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("o{k}.cfs"));
        let log = dir.path().join(format!("l{k}.json"));
        let o = conesys(&["optimize", path(&f), "--out", path(&out), "--log", path(&log), "--max-passes", "10"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        runs.push((o.stdout, std::fs::read(&out).unwrap(), std::fs::read(&log).unwrap()));
    }
    assert_eq!(runs[0], runs[1]);
    let report: Value = serde_json::from_slice(&runs[0].0).unwrap();
    assert_eq!(report["singularities"], 1);
}

#[test]
fn torus_svg_labels_its_cuts() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("t.cfs");
    conesys(&["gen", "torus", "--out", path(&f)]);
    let out = conesys(&["export-svg", path(&f)]);
    assert!(out.status.success());
    let svg = String::from_utf8(out.stdout).unwrap();
    assert!(svg.starts_with("<?xml"));
    assert_eq!(svg.matches("<text").count(), 4);
}
