use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn phq(args: &[&str], out_env: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_phq"));
    cmd.args(args).env_remove("PHQ_OUT_DIR");
    if let Some(dir) = out_env {
        cmd.env("PHQ_OUT_DIR", dir);
    }
    cmd.output().expect("phq runs")
}

fn shipped(name: &str) -> String {
    format!("{}/specs/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

fn write_spec(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("spec.json");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn shipped_specs_validate() {
    for name in ["step_potential", "pt_toy", "random_real_spectrum"] {
        let out = phq(&["validate", &shipped(name)], None);
        assert!(
            out.status.success(),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn invalid_spec_exits_with_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        r#"{"name": "x", "model": {"matrix": {"entries": [[[1, 0]]]}}, "tasks": [{"perturbative": {"ell": 9}}]}"#,
    );
    let out = phq(&["validate", spec.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tasks[0].perturbative.ell"));
}

#[test]
fn small_specs_pass_and_print_json() {
    for name in ["pt_toy", "random_real_spectrum"] {
        let out = phq(&["run", &shipped(name)], None);
        assert_eq!(out.status.code(), Some(0), "{name}");
        let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(report["pass"], true);
        assert_eq!(
            report["provenance"]["spec_sha256"].as_str().unwrap().len(),
            64
        );
    }
}

#[test]
fn seed_changes_random_model() {
    let spec = shipped("random_real_spectrum");
    let a = phq(&["run", &spec, "--seed", "1"], None).stdout;
    let b = phq(&["run", &spec, "--seed", "2"], None).stdout;
    let a2 = phq(&["run", &spec, "--seed", "1"], None).stdout;
    assert_ne!(a, b);
    assert_eq!(a, a2);
}

#[test]
fn defective_matrix_exits_nonzero_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        r#"{"name": "jordan", "model": {"matrix": {"entries": [[[1, 0], [1, 0]], [[0, 0], [1, 0]]]}}, "tasks": ["spectral"]}"#,
    );
    let out = phq(&["run", spec.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["tasks"][0]["ok"], false);
}

#[test]
fn csv_bundle_goes_to_env_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = phq(
        &["run", &shipped("pt_toy"), "--format", "csv"],
        Some(dir.path()),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let scaling = fs::read_to_string(dir.path().join("scaling.csv")).unwrap();
    let lines: Vec<&str> = scaling.lines().collect();
    assert_eq!(lines[0], "epsilon,residual");
    assert_eq!(lines.len(), 5);
    assert!(dir.path().join("spectra.csv").exists());
    assert!(dir.path().join("verdicts.csv").exists());
}

#[test]
fn csv_without_directory_is_an_error() {
    let out = phq(&["run", &shipped("pt_toy"), "--format", "csv"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn orders_summary() {
    let out = phq(&["orders", "3"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(!text.contains("FAIL"));
    assert_eq!(phq(&["orders", "9"], None).status.code(), Some(2));
}
