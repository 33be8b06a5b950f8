use std::path::Path;
use std::process::{Command, Output};

use covertlink::experiments::{ExperimentConfig, RunMetadata};

fn covertlink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_covertlink"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn echo_config_round_trips() {
    let out = covertlink(&["run", "--preset", "fig8", "--desk-scale", "--set", "rho=1.3", "--echo-config"]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let cfg = ExperimentConfig::from_json(&text(&out.stdout)).unwrap();
    assert_eq!(cfg.name, "fig8-desk");
    assert_eq!(cfg.scenario.rho, 1.3);
    assert_eq!(cfg.scenario.m_a, [4, 4]);
}

#[test]
fn validate_lists_every_problem() {
    let dir = tempfile::tempdir().unwrap();
    let good = write_config(dir.path(), "good.json", r#"{"name": "ok", "scenario": {"m_a": [2, 2]}, "seeds": 1}"#);
    let out = covertlink(&["validate", "--config", &good]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert!(text(&out.stdout).contains("ok"));

    let bad = write_config(
        dir.path(),
        "bad.json",
        r#"{"scenario": {"rho": 0.9, "epsilon_w": 2.0}, "sweep": {"variable": "bandwidth", "values": [1]}}"#,
    );
    let out = covertlink(&["validate", "--config", &bad]);
    assert_eq!(out.status.code(), Some(1));
    let err = text(&out.stderr);
    for needle in ["rho", "epsilon_w", "bandwidth"] {
        assert!(err.contains(needle), "{needle} missing from {err}");
    }

    let unknown = write_config(dir.path(), "unknown.json", r#"{"scenario": {"bandwidth_hz": 1e6}}"#);
    assert_eq!(covertlink(&["validate", "--config", &unknown]).status.code(), Some(1));
}

#[test]
fn unknown_preset_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = covertlink(&["run", "--preset", "fig99", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("fig5"));
}

#[test]
fn dep_run_writes_csv_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let out = covertlink(&[
        "run", "--preset", "fig3", "--desk-scale", "--seed", "5", "--set", "mc.n_trials=20000", "--set",
        "tau_points=4", "--out", out_dir,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("fig3-desk.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("rho,tau,xi_analytic,xi_lb,xi_emp,se"));
    assert_eq!(lines.count(), 8);
    let meta: RunMetadata =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fig3-desk.json")).unwrap()).unwrap();
    assert_eq!(meta.config.seed, 5);
    assert_eq!(meta.config.mc.seed, 5);
    assert_eq!(meta.config_hash.len(), 64);
    assert_eq!(meta.rows, 8);
}

#[test]
fn failed_design_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "zf.json",
        r#"{"name": "zf-short", "designs": ["ZF"], "scenario": {"m_a": [1, 2]}, "seeds": 1}"#,
    );
    let out = covertlink(&["run", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", text(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("zf-short.csv")).unwrap();
    assert!(csv.starts_with("R_ZF,samples,failed_samples\n"), "{csv}");
}
