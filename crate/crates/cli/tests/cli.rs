use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use kaclab_cli::manifest::verify_manifest;

fn kaclab(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kaclab")).arg("--out").arg(out).args(args).output().expect("binary runs")
}

/// The single experiment directory under `root` whose name starts with `prefix`.
fn experiment_dir(root: &Path, prefix: &str) -> PathBuf {
    let mut dirs: Vec<PathBuf> = fs::read_dir(root)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_string_lossy().starts_with(prefix))
        .collect();
    assert_eq!(dirs.len(), 1, "{dirs:?}");
    dirs.pop().unwrap()
}

#[test]
fn gap_prints_the_closed_form_value() {
    let tmp = tempfile::tempdir().unwrap();
    let out = kaclab(tmp.path(), &["gap", "--n", "2", "--m", "1", "--lambda", "1", "--mu", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((json["gap"].as_f64().unwrap() - 0.38196601).abs() < 1e-8);
    assert_eq!(json["pass"], true);
    let dir = experiment_dir(tmp.path(), "gap-");
    let manifest = verify_manifest(&dir).unwrap();
    assert_eq!(manifest.subcommand, "gap");
    assert!(manifest.outputs.iter().any(|o| o.path == "gap.json"));
}

#[test]
fn missing_config_file_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = kaclab(tmp.path(), &["--config", "/does/not/exist.ini", "simulate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/does/not/exist.ini"));
}

#[test]
fn missing_and_unknown_keys_are_named() {
    let tmp = tempfile::tempdir().unwrap();
    let out = kaclab(tmp.path(), &["simulate", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`m`"));

    let cfg = tmp.path().join("run.ini");
    fs::write(&cfg, "n = 3\nm = 1\nlamda = 2\n").unwrap();
    let out = kaclab(tmp.path(), &["--config", cfg.to_str().unwrap(), "simulate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lamda"));
}

#[test]
fn invalid_values_exit_with_config_code() {
    let tmp = tempfile::tempdir().unwrap();
    for args in [
        &["gap", "--n", "2", "--m", "3"][..],
        &["spectrum", "--n-max", "41"],
        &["vanhove", "--lambdas", "0.1,0.2"],
        &["entropy-bound", "--initial", "cube:1"],
    ] {
        let out = kaclab(tmp.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn flags_override_the_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.ini");
    fs::write(&cfg, "# spectrum settings\nlambda = 2\nmu = 3\nn_max = 4\n").unwrap();
    let out = kaclab(tmp.path(), &["--config", cfg.to_str().unwrap(), "spectrum", "--n-max", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let dir = experiment_dir(tmp.path(), "spectrum-");
    let manifest = verify_manifest(&dir).unwrap();
    assert_eq!(manifest.config["lambda"], 2.0);
    assert_eq!(manifest.config["n_max"], 2);
    let csv = fs::read_to_string(dir.join("spectrum.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 + 2 * 2);
}

#[test]
fn reruns_reproduce_files_and_ids() {
    let args = ["--seed", "11", "simulate", "--n", "3", "--m", "1", "--ensemble", "2000", "--horizon", "2"];
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert_eq!(kaclab(a.path(), &args).status.code(), Some(0));
    assert_eq!(kaclab(b.path(), &args).status.code(), Some(0));
    let (da, db) = (experiment_dir(a.path(), "simulate-"), experiment_dir(b.path(), "simulate-"));
    assert_eq!(da.file_name(), db.file_name());
    assert_eq!(fs::read(da.join("simulate.csv")).unwrap(), fs::read(db.join("simulate.csv")).unwrap());

    let other = tempfile::tempdir().unwrap();
    let mut reseeded = args;
    reseeded[1] = "12";
    assert_eq!(kaclab(other.path(), &reseeded).status.code(), Some(0));
    assert_ne!(experiment_dir(other.path(), "simulate-").file_name(), da.file_name());
}

#[test]
fn tampered_outputs_are_detected() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(kaclab(tmp.path(), &["counterexample"]).status.code(), Some(0));
    let dir = experiment_dir(tmp.path(), "counterexample-");
    verify_manifest(&dir).unwrap();
    fs::write(dir.join("counterexample.csv"), "edited\n").unwrap();
    assert!(verify_manifest(&dir).is_err());
}

#[test]
fn output_root_comes_from_the_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_kaclab"))
        .env("KACLAB_OUT", tmp.path())
        .args(["spectrum", "--n-max", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    experiment_dir(tmp.path(), "spectrum-");
}

#[test]
fn vanhove_writes_grids_on_request() {
    let tmp = tempfile::tempdir().unwrap();
    let out = kaclab(
        tmp.path(),
        &["vanhove", "--points", "65", "--lambdas", "0.2,0.1", "--dyson-order", "4", "--save-grids", "true", "--threshold", "1"],
    );
    assert!(out.status.code().is_some_and(|c| c <= 1), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = experiment_dir(tmp.path(), "vanhove-");
    let manifest = verify_manifest(&dir).unwrap();
    for name in ["vanhove.csv", "identity.csv", "dyson.csv", "weak_limit.bin", "smallest_lambda.bin"] {
        assert!(manifest.outputs.iter().any(|o| o.path == name), "{name} missing");
    }
    let grid = kaclab::grid::read_grid::<2>(&dir.join("weak_limit.bin")).unwrap();
    assert!((grid.mass() - 1.0).abs() < 1e-6);
    let header = fs::read_to_string(dir.join("vanhove.csv")).unwrap();
    assert!(header.starts_with("lambda,L1_distance\n"));
}
