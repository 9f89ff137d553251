// SPDX-License-Identifier: MIT OR Apache-2.0

use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use wgcpd::null::{pvalue_from_null, simulate_null_s2};
use wgcpd::{ScanWindow, Statistic};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn wgcpd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wgcpd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_out(args: &[&str]) -> Value {
    let out = wgcpd(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn detect_mean_shift_fixture() {
    let input = fixture("mean_shift.csv");
    let v = json_out(&["detect", "--input", path_str(&input), "--statistic", "S1", "--seed", "3"]);
    let tau = v["tau_hat"].as_u64().unwrap();
    assert!((31..=35).contains(&tau), "tau_hat {tau}");
    assert!(v["p_value"].as_f64().unwrap() < 0.01);
    assert_eq!(v["n"], 100);
    assert_eq!(v["window"]["n0"], 10);
    assert!(v["diagnostics"]["s_hat"].as_f64().unwrap() > 0.0);
    assert!(!v["diagnostics"]["kept_eigenvalues"].as_array().unwrap().is_empty());
}

#[test]
fn detect_constant_data() {
    let input = fixture("constant.csv");
    let v = json_out(&["detect", "--input", path_str(&input)]);
    assert_eq!(v["value"].as_f64(), Some(0.0));
    assert_eq!(v["p_value"].as_f64(), Some(1.0));

    let out = wgcpd(&["detect", "--input", path_str(&input), "--statistic", "S2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate dispersion"));
}

#[test]
fn usage_and_kind_errors() {
    let input = fixture("mean_shift.csv");
    let out = wgcpd(&["distances", "--input", path_str(&input), "--metric", "manhattan"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));

    let out = wgcpd(&["detect", "--input", path_str(&input), "--metric", "deltacon"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot be applied"));

    let out = wgcpd(&["detect", "--input", "/nonexistent/file.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_lists_flags() {
    for sub in ["detect", "segment", "pvalue", "simulate", "distances"] {
        let out = wgcpd(&[sub, "--help"]);
        assert!(out.status.success());
        let text = String::from_utf8_lossy(&out.stdout);
        assert!(text.contains("--threads") && text.contains("--out"), "{sub}");
    }
    let text = String::from_utf8_lossy(&wgcpd(&["detect", "--help"]).stdout).to_string();
    for flag in [
        "--input", "--distance-matrix", "--metric", "--statistic", "--rho0", "--rho1",
        "--pvalue", "--correction-variant", "--reps", "--seed", "--grid-start", "--grid-end",
        "--format",
    ] {
        assert!(text.contains(flag), "{flag}");
    }
    let text = String::from_utf8_lossy(&wgcpd(&["segment", "--help"]).stdout).to_string();
    assert!(text.contains("--alpha") && text.contains("--nmin"));
}

#[test]
fn distances_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("mean_shift.csv");
    let dm = dir.path().join("d.csv");
    let out = wgcpd(&["distances", "--input", path_str(&input), "--out", path_str(&dm)]);
    assert!(out.status.success());
    let a = json_out(&["detect", "--input", path_str(&input), "--seed", "9"]);
    let b = json_out(&["detect", "--distance-matrix", path_str(&dm), "--seed", "9"]);
    assert_eq!(a, b);
}

#[test]
fn segment_two_changes() {
    let input = fixture("two_changes.csv");
    let v = json_out(&["segment", "--input", path_str(&input), "--seed", "1"]);
    let cps: Vec<i64> = v["change_points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_i64().unwrap())
        .collect();
    assert_eq!(cps.len(), 2, "{cps:?}");
    assert!((cps[0] - 40).abs() <= 3 && (cps[1] - 100).abs() <= 3, "{cps:?}");
    let root = &v["tree"];
    for key in ["l", "r", "stat", "p", "k", "accepted"] {
        assert!(root.get(key).is_some(), "{key}");
    }
}

#[test]
fn pvalue_matches_library() {
    let v = json_out(&[
        "pvalue", "--observed", "3.0", "--statistic", "S2", "--engine", "asymptotic", "--n",
        "100", "--reps", "500", "--seed", "12",
    ]);
    let bounds = ScanWindow::default().bounds(100).unwrap();
    let null = simulate_null_s2(bounds, 500, 12).unwrap();
    let p = pvalue_from_null(&null, 3.0);
    assert_eq!(v["p_value"].as_f64(), Some(p.value));
    assert_eq!(v["statistic"], Statistic::S2.name());

    let out = wgcpd(&["pvalue", "--observed", "3.0", "--statistic", "S2", "--pvalue", "corrected", "--n", "100"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("mean_shift.csv");
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for (path, threads) in [(&a, "1"), (&b, "3")] {
        let out = wgcpd(&[
            "detect", "--input", path_str(&input), "--pvalue", "permutation", "--reps", "300",
            "--seed", "5", "--threads", threads, "--out", path_str(path),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn simulate_writes_documented_columns() {
    let out = wgcpd(&["simulate", "--scenario", "table1", "--reps", "50", "--seed", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "scenario,statistic,engine,reps,power,power_se,loc_err,loc_err_se,rand,rand_se,seconds"
    );
    assert_eq!(lines.count(), 12);
}
