//! End-to-end tests driving the `capfb` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn capfb() -> Command {
    Command::new(env!("CARGO_BIN_EXE_capfb"))
}

fn spec(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../specs")
        .join(name)
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON document")
}

#[test]
fn capacity_gaussian_unstable_is_half_bit() {
    let out = capfb()
        .args(["capacity", "--spec"])
        .arg(spec("gaussian_unstable.json"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    assert!((doc["capacityBits"].as_f64().unwrap() - 0.5).abs() < 1e-10);
    assert_eq!(doc["regime"], "active");
    assert!((doc["kappaMin"].as_f64().unwrap() - 3.0).abs() < 1e-14);
    assert!((doc["avgCost"].as_f64().unwrap() - 7.0).abs() < 1e-10);
}

#[test]
fn capacity_finite_bsc() {
    let out = capfb()
        .args(["capacity", "--spec"])
        .arg(spec("bsc01.json"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    assert!((doc["capacityBits"].as_f64().unwrap() - 0.531004).abs() < 1e-6);
    assert_eq!(doc["ergodic"]["irreducible"], true);
}

#[test]
fn capacity_rejects_malformed_kernel_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{
            "schemaVersion": 1,
            "kind": "finite",
            "finite": {
                "inputSize": 2, "outputSize": 2, "memoryM": 0,
                "kernel": [[[0.5, 0.3], [0.1, 0.9]]]
            }
        }"#,
    )
    .unwrap();
    let out = capfb().args(["capacity", "--spec"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("state 0, input 0"), "{stderr}");
}

#[test]
fn capacity_missing_spec_is_io_error() {
    let out = capfb()
        .args(["capacity", "--spec", "/nonexistent/never.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn capacity_emits_policy_rows() {
    let dir = tempfile::tempdir().unwrap();
    let policy_path = dir.path().join("policy.csv");
    let out = capfb()
        .args(["capacity", "--spec"])
        .arg(spec("umco_cost.json"))
        .arg("--emit-policy")
        .arg(&policy_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dump = std::fs::read_to_string(&policy_path).unwrap();
    let lines: Vec<&str> = dump.lines().collect();
    // J = max(M, K) = 1 over a binary output alphabet: two states
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("0,0,"));
    assert!(lines[1].starts_with("1,1,"));
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 4);
        let p0: f64 = fields[2].parse().unwrap();
        let p1: f64 = fields[3].parse().unwrap();
        assert!((p0 + p1 - 1.0).abs() < 1e-12);
    }
}

#[test]
fn capacity_gaussian_matrix_block_diagonal() {
    let out = capfb()
        .args(["capacity", "--spec"])
        .arg(spec("gaussian_matrix.json"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    // decoupled blocks: (C=2, K_V=1) and (C=0.5, K_V=2) at total budget 13
    // solve to 1/2 ln 8 - ln 2 + 1/2 ln 4 summed
    let expect = (0.5 * 8.0f64.ln() - 2.0f64.ln()) + 0.5 * 4.0f64.ln();
    assert!(
        (doc["capacityNats"].as_f64().unwrap() - expect).abs() < 1e-5,
        "got {}",
        doc["capacityNats"]
    );
}

fn read_rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(
        header,
        "kappa,capacity_bits,capacity_nats,s_star,kappa_min,avg_cost,regime"
    );
    lines
        .map(|l| l.split(',').map(|s| s.to_string()).collect())
        .collect()
}

#[test]
fn sweep_unstable_scalar_below_threshold_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("sweep.csv");
    let out = capfb()
        .args(["sweep", "--spec"])
        .arg(spec("gaussian_unstable.json"))
        .args(["--kappa-min", "0", "--kappa-max", "10", "--steps", "11", "--out"])
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_rows(&out_path);
    assert_eq!(rows.len(), 11);
    for row in &rows {
        let kappa: f64 = row[0].parse().unwrap();
        let bits: f64 = row[1].parse().unwrap();
        if kappa <= 3.0 {
            assert_eq!(bits, 0.0, "kappa {kappa}");
            assert_eq!(row[6], "belowMin");
        } else {
            assert!(bits > 0.0);
            assert_eq!(row[6], "active");
        }
    }
}

#[test]
fn sweep_stable_scalar_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("sweep.csv");
    let out = capfb()
        .args(["sweep", "--spec"])
        .arg(spec("gaussian_stable.json"))
        .args(["--kappa-min", "0", "--kappa-max", "10", "--steps", "21", "--out"])
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(out.status.success());
    for row in read_rows(&out_path) {
        let kappa: f64 = row[0].parse().unwrap();
        let bits: f64 = row[1].parse().unwrap();
        assert!((bits - 0.5 * (1.0 + kappa).log2()).abs() < 1e-10);
    }
}

#[test]
fn sweep_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let a_path = dir.path().join("a.csv");
    let b_path = dir.path().join("b.csv");
    for path in [&a_path, &b_path] {
        let out = capfb()
            .args(["sweep", "--spec"])
            .arg(spec("bsc01_cost.json"))
            .args(["--kappa-min", "0.05", "--kappa-max", "0.6", "--steps", "8", "--out"])
            .arg(path)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(&a_path).unwrap();
    let b = std::fs::read(&b_path).unwrap();
    assert_eq!(a, b, "two identical sweeps must be byte-identical");
    // 17-significant-digit round trip: parse and reformat reproduces the text
    for row in read_rows(&a_path) {
        for field in &row[..6] {
            if field.is_empty() {
                continue;
            }
            let x: f64 = field.parse().unwrap();
            assert_eq!(&format!("{x:.16e}"), field);
        }
    }
}

#[test]
fn sweep_degenerate_two_steps() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("two.csv");
    let out = capfb()
        .args(["sweep", "--spec"])
        .arg(spec("gaussian_stable.json"))
        .args(["--kappa-min", "1", "--kappa-max", "2", "--steps", "2", "--out"])
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(read_rows(&out_path).len(), 2);
}

#[test]
fn sweep_rejects_bad_grid() {
    let out = capfb()
        .args(["sweep", "--spec"])
        .arg(spec("gaussian_stable.json"))
        .args(["--kappa-min", "1", "--kappa-max", "2", "--steps", "1", "--out", "/tmp/x.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_unwritable_path_is_io_error() {
    let out = capfb()
        .args(["sweep", "--spec"])
        .arg(spec("gaussian_stable.json"))
        .args([
            "--kappa-min",
            "1",
            "--kappa-max",
            "2",
            "--steps",
            "2",
            "--out",
            "/nonexistent-dir/out.csv",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn capacity_iteration_cap_is_non_convergence() {
    let out = capfb()
        .args(["capacity", "--spec"])
        .arg(spec("umco_cost.json"))
        .args(["--max-iter", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn capacity_reducible_chain_trips_ergodicity_diagnostic() {
    // the output freezes at the previous symbol: two absorbing window states
    let out = capfb()
        .args(["capacity", "--spec"])
        .arg(spec("frozen_channel.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("ergodicity"), "{stderr}");
}

#[test]
fn verify_gaussian_suite_passes() {
    let out = capfb().args(["verify", "--suite", "gaussian"]).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    assert!(stdout.contains("[PASS] gaussian-unstable-threshold"), "{stdout}");
}

#[test]
fn verify_all_aggregates_every_suite() {
    let out = capfb().args(["verify", "--suite", "all"]).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    for name in [
        "gaussian-unstable-threshold",
        "finite-memoryless-oracle",
        "information-structure-theorem",
        "variational-equality",
    ] {
        assert!(stdout.contains(name), "missing {name} in:\n{stdout}");
    }
}

#[test]
fn verify_variational_suite_passes() {
    let out = capfb().args(["verify", "--suite", "variational"]).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    assert!(stdout.contains("[PASS] variational-equality"), "{stdout}");
}

#[test]
fn verify_unknown_suite_is_validation_error() {
    let out = capfb().args(["verify", "--suite", "bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_oracle_with_forced_misrestriction_fails() {
    let out = capfb()
        .args(["verify", "--suite", "oracle"])
        .env("CAPFB_VERIFY_FORCE_J", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("[FAIL] restriction-lossless"), "{stdout}");
    assert!(stdout.contains("gap"), "{stdout}");
}
