mod common;

use std::path::Path;

use common::*;
use pbls::opb::serialize_instance;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("pbls").chain(args.iter().copied());
    let code = pbls::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn triangle_file(dir: &Path) -> String {
    let p = dir.join("triangle.opb");
    std::fs::write(&p, serialize_instance(&triangle())).unwrap();
    p.to_str().unwrap().to_string()
}

fn json(s: &str) -> serde_json::Value {
    assert_eq!(s.lines().count(), 1, "{s}");
    serde_json::from_str(s).unwrap()
}

#[test]
fn solves_triangle_as_json() {
    let dir = tempfile::tempdir().unwrap();
    let p = triangle_file(dir.path());
    let (code, out, _) = run(&["--instance", &p, "--cutoff-ms", "2000", "--seed", "1", "--output", "json", "--print-model"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["status"], "feasible");
    assert_eq!(v["obj"], 2);
    assert_eq!(v["seed"], 1);
    assert_eq!(v["slots"]["update_weights"], "baseline.update_weights.v0");
    assert_eq!(v["assignment"].as_str().unwrap().matches('1').count(), 2);
}

#[test]
fn human_output_has_status_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = triangle_file(dir.path());
    let (code, out, _) = run(&["--instance", &p, "--cutoff-ms", "2000", "--print-model"]);
    assert_eq!(code, 0);
    assert!(out.lines().any(|l| l == "o 2"), "{out}");
    assert!(out.lines().any(|l| l == "s SATISFIABLE"), "{out}");
    assert!(out.lines().any(|l| l.starts_with("v ")), "{out}");
}

#[test]
fn zero_steps_reports_no_solution() {
    let dir = tempfile::tempdir().unwrap();
    let p = triangle_file(dir.path());
    let (code, out, _) = run(&[
        "--instance", &p, "--max-steps", "0", "--output", "json",
        "--slot", "initialize_assignment=zeros.initialize_assignment.v0",
    ]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["status"], "infeasible");
    assert!(v.get("obj").is_none());
    assert_eq!(v["steps"], 0);
}

#[test]
fn missing_instance_is_named() {
    let (code, out, err) = run(&["--instance", "/no/such/file.opb", "--output", "json"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("/no/such/file.opb"), "{err}");
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn bad_flags_exit_with_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = triangle_file(dir.path());
    for args in [
        vec!["--instance", &p, "--cutoff-ms", "soon"],
        vec!["--instance", &p, "--cutoff-ms", "0"],
        vec!["--instance", &p, "--frobnicate"],
        vec!["--instance", &p, "--slot", "update_weights"],
        vec!["--instance", &p, "--slot", "update_weights=magic.v9"],
        vec!["--instance", &p, "--slot", "pick_worst=baseline.pick_best_variable.v0"],
        vec!["--instance", &p, "--sp", "1.5"],
    ] {
        let (code, _, err) = run(&args);
        assert_eq!(code, 2, "{args:?}");
        assert!(err.starts_with("pbls: "), "{err}");
    }
}

#[test]
fn repeated_runs_are_identical_apart_from_time() {
    let dir = tempfile::tempdir().unwrap();
    let f = random_instance(&mut rng(5), "r", 40, 50, true);
    let p = dir.path().join("r.opb");
    std::fs::write(&p, serialize_instance(&f)).unwrap();
    let p = p.to_str().unwrap();
    let args = ["--instance", p, "--seed", "9", "--max-steps", "5000", "--output", "json", "--print-model"];
    let strip = |s: String| {
        let mut v = json(&s);
        v.as_object_mut().unwrap().remove("elapsed_ms");
        v
    };
    assert_eq!(strip(run(&args).1), strip(run(&args).1));
}
