use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frametensor"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn gen(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name);
    let path_str = path.to_str().unwrap().to_string();
    let mut full = vec!["gen-frame"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", &path_str]);
    let out = run(&full);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    path_str
}

fn num(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

#[test]
fn gram_of_orthonormal_basis_has_unit_norm() {
    let dir = tempfile::tempdir().unwrap();
    let frame = gen(dir.path(), "onb.json", &["--kind", "orthonormal", "--n", "5"]);
    for spec in ["jaffard:2", "schur:1:1", "schur:inf:2", "sjostrand:1"] {
        let out = run(&["gram", &frame, "--spec", spec]);
        assert_eq!(out.status.code(), Some(0));
        let report = stdout_json(&out);
        assert!((num(&report["norm"]) - 1.0).abs() < 1e-15, "{spec}");
    }
}

#[test]
fn gram_of_shift_invariant_frame_matches_autocorrelation() {
    let dir = tempfile::tempdir().unwrap();
    let n = 10;
    let width = 2.0;
    let frame = gen(
        dir.path(),
        "shift.json",
        &["--kind", "shift-invariant", "--n", "10", "--width", "2"],
    );
    let out = run(&["gram", &frame, "--spec", "jaffard:1"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);

    // real symmetric window: G[a, b] = c(b - a) with c the cyclic autocorrelation
    let g: Vec<f64> = (0..n)
        .map(|t: usize| {
            let d = t.min(n - t) as f64;
            (-std::f64::consts::PI * (d / width).powi(2)).exp()
        })
        .collect();
    let c = |d: usize| (0..n).map(|s| g[(s + d) % n] * g[s]).sum::<f64>();
    let mut jaffard = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let dist = (a as f64 - b as f64).abs();
            jaffard = jaffard.max(c((b + n - a) % n) * (1.0 + dist));
        }
    }
    assert!((num(&report["norm"]) - jaffard).abs() < 1e-12 * jaffard);

    // operator norm = largest |DFT(g)|^2
    let top = (0..n)
        .map(|w| {
            let (mut re, mut im) = (0.0, 0.0);
            for (t, gt) in g.iter().enumerate() {
                let phase = -2.0 * std::f64::consts::PI * (w * t) as f64 / n as f64;
                re += gt * phase.cos();
                im += gt * phase.sin();
            }
            re * re + im * im
        })
        .fold(0.0, f64::max);
    assert!((num(&report["operator_norm"]) - top).abs() < 1e-10 * top);
    assert!((num(&report["frame_bounds"]["upper"]) - top).abs() < 1e-10 * top);
}

#[test]
fn gram_csv_is_the_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let frame = gen(dir.path(), "u.json", &["--kind", "union", "--n", "3"]);
    let out = run(&["gram", &frame, "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text.lines().all(|l| l.split(',').count() == 6));
}

#[test]
fn tensor_of_orthonormal_bases_is_trivial() {
    let dir = tempfile::tempdir().unwrap();
    let a = gen(dir.path(), "a.json", &["--kind", "orthonormal", "--n", "3"]);
    let b = gen(dir.path(), "b.json", &["--kind", "orthonormal", "--n", "4"]);
    let out = run(&["tensor", &a, &b, "--spec1", "jaffard:2", "--spec2", "schur:1:1"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    for entry in report["norms"].as_array().unwrap() {
        assert_eq!(num(&entry["computed"]), 1.0);
        assert_eq!(num(&entry["relative_difference"]), 0.0);
    }
}

#[test]
fn tensor_of_two_shift_invariant_frames_with_distinct_weights() {
    let dir = tempfile::tempdir().unwrap();
    let a = gen(dir.path(), "a.json", &["--kind", "shift-invariant", "--n", "6", "--width", "1.5"]);
    let b = gen(dir.path(), "b.json", &["--kind", "shift-invariant", "--n", "5", "--width", "1.2"]);
    let out = run(&["tensor", &a, &b, "--spec1", "jaffard:1", "--spec2", "jaffard:3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    let norms = report["norms"].as_array().unwrap();
    assert_eq!(norms.len(), 3);
    for entry in norms {
        assert!(num(&entry["computed"]).is_finite());
        assert!(num(&entry["relative_difference"]) < 1e-10);
    }
}

#[test]
fn missing_and_malformed_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "[1, 2").unwrap();
    assert_eq!(run(&["gram", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["gram", "nowhere.json"]).status.code(), Some(2));
    assert_eq!(run(&["tensor", "nowhere.json", "nowhere.json"]).status.code(), Some(2));
    let onb = gen(dir.path(), "onb.json", &["--kind", "orthonormal", "--n", "2"]);
    assert_eq!(run(&["gram", &onb, "--spec", "jaffard:-1"]).status.code(), Some(2));
    assert_eq!(run(&["gram", &onb, "--spec", "banach"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn verify_smoke_run_is_fast_and_passes() {
    let start = std::time::Instant::now();
    let out = run(&["verify", "--trials", "1"]);
    assert!(start.elapsed().as_secs_f64() < 5.0);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["pass"], Value::Bool(true));
}

#[test]
fn forced_failure_reports_the_record() {
    let out = run(&["verify", "--trials", "2", "--tol", "flatten_homomorphism=0", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("FAILED flatten_homomorphism"), "{stderr}");
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("name,trials,max_violation,tolerance,pass\n"));
    assert!(csv.lines().any(|l| l.starts_with("flatten_homomorphism,") && l.ends_with(",false")));
}

#[test]
fn verify_with_custom_spec_pair() {
    let out = run(&[
        "verify", "--trials", "2", "--n1", "3", "--n2", "2", "--spec1", "schur:1:0", "--spec2",
        "sjostrand:0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["environment"]["spec_pairs"].as_array().unwrap().len(), 1);
    assert_eq!(report["environment"]["outer_size"], 3);
}

#[test]
fn different_seeds_change_the_report() {
    let a = run(&["verify", "--trials", "2", "--seed", "1"]).stdout;
    let b = run(&["verify", "--trials", "2", "--seed", "2"]).stdout;
    assert_ne!(a, b);
}

#[test]
fn inverse_trend_without_perturbation_is_identity() {
    let out = run(&["inverse-trend", "--perturbation", "0"]);
    assert_eq!(out.status.code(), Some(0));
    for row in stdout_json(&out).as_array().unwrap() {
        assert!((num(&row["norm_a_inverse"]) - 1.0).abs() < 1e-15);
    }
}

#[test]
fn inverse_trend_respects_neumann_bound() {
    let out = run(&["inverse-trend", "--sizes", "2,3,4,5", "--perturbation", "0.5", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    for row in rows {
        let cells: Vec<&str> = row.split(',').collect();
        let bound: f64 = cells[3].parse().unwrap();
        assert!(bound <= 2.0 + 1e-8, "{row}");
        assert!(row.ends_with("\"ok\""));
    }
}

#[test]
fn inverse_trend_marks_singular_rows() {
    let out = run(&["inverse-trend", "--kind", "scalar", "--perturbation", "1", "--sizes", "2,3"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = stdout_json(&out);
    for row in rows.as_array().unwrap() {
        assert!(row["status"].as_str().unwrap().contains("singular"));
        assert!(row.get("norm_a_inverse").is_none());
    }
}

#[test]
fn gen_frame_roundtrips_through_gram() {
    let dir = tempfile::tempdir().unwrap();
    let frame = gen(dir.path(), "u.json", &["--kind", "union", "--n", "4"]);
    let parsed: Value = serde_json::from_str(&std::fs::read_to_string(&frame).unwrap()).unwrap();
    assert_eq!(parsed["vectors"].as_array().unwrap().len(), 8);
    let out = run(&["gram", &frame, "--spec", "schur:1:0"]);
    let report = stdout_json(&out);
    assert!((num(&report["frame_bounds"]["lower"]) - 2.0).abs() < 1e-12);
}
