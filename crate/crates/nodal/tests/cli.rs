//! End-to-end behaviour of the `nodal` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn nodal(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nodal"))
        .args(args)
        .arg("--output-dir")
        .arg(dir)
        .env_remove("NODAL_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = match fs::read_dir(dir) {
        Ok(rd) => rd.map(|e| e.unwrap().path()).collect(),
        Err(_) => Vec::new(),
    };
    v.sort();
    v
}

fn with_ext(dir: &Path, ext: &str) -> Vec<PathBuf> {
    files(dir).into_iter().filter(|p| p.to_string_lossy().ends_with(ext)).collect()
}

fn stderr_record(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("stderr is not one JSON record ({e}): {text}"))
}

#[test]
fn unknown_flag_is_a_config_error_without_files() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = nodal(&out_dir, &["barrier", "--colour", "red"]);
    assert_eq!(out.status.code(), Some(2));
    let rec = stderr_record(&out);
    assert_eq!(rec["error"], "config");
    assert_eq!(rec["exit_code"], 2);
    assert!(files(&out_dir).is_empty());
}

#[test]
fn invalid_values_are_config_errors_without_files() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["barrier", "--n", "2", "--sigma", "sphere"][..],
        &["barrier", "--trials", "50"],
        &["barrier", "--model", "polynomial", "--n", "2"],
        &["barrier", "--model", "polynomial", "--n", "2", "--m", "2", "--R", "9"],
        &["packing", "--radius", "1.0"],
        &["packing", "--radius", "0.1", "--m", "10", "--R", "1"],
        &["rkhs-fit", "--target", "monomial:1,2"],
        &["field-sample", "--sampler", "exact", "--resolution", "200"],
        &["scaling", "--sigma", "genus:-1"],
    ] {
        let out = nodal(dir.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert_eq!(stderr_record(&out)["exit_code"], 2);
    }
    assert!(files(dir.path()).is_empty());
}

#[test]
fn barrier_run_writes_manifest_and_estimates() {
    let dir = tempfile::tempdir().unwrap();
    let out = nodal(dir.path(), &["barrier", "--n", "2", "--sigma", "circle", "--R", "6", "--trials", "1000", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let manifests = with_ext(dir.path(), ".manifest.json");
    assert_eq!(manifests.len(), 1);
    let name = manifests[0].file_name().unwrap().to_string_lossy().into_owned();
    assert!(name.starts_with("barrier-s7-"), "{name}");
    let m: Value = serde_json::from_str(&fs::read_to_string(&manifests[0]).unwrap()).unwrap();
    assert_eq!(m["schema"], 1);
    assert_eq!(m["status"], "complete");
    assert_eq!(m["seed"], 7);
    assert_eq!(m["parameters"]["R"], serde_json::json!([6.0]));
    assert_eq!(m["results"]["aggregates"]["outcomes"].as_array().unwrap().len(), 1000);
    let csv = fs::read_to_string(&with_ext(dir.path(), ".csv")[0]).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "R,m,sigma,successes,trials,degenerate,uncertain,p_hat,ci_low,ci_high");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[1], "limit");
    assert!(row[8].parse::<f64>().unwrap() > 0.0);
}

#[test]
fn reruns_and_replays_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    let args = ["scaling", "--N", "2", "--degrees", "3,6", "--resolution", "65", "--trials", "40", "--seed", "11"];
    let with_threads = |d: &Path, t: &str| {
        let mut v = args.to_vec();
        v.extend(["--threads", t]);
        nodal(d, &v)
    };
    assert_eq!(with_threads(&a, "1").status.code(), Some(0));
    assert_eq!(with_threads(&b, "3").status.code(), Some(0));
    let csv_a = with_ext(&a, ".csv");
    assert_eq!(csv_a.len(), 2);
    for p in &csv_a {
        assert_eq!(fs::read(p).unwrap(), fs::read(b.join(p.file_name().unwrap())).unwrap());
    }
    let manifest = &with_ext(&a, ".manifest.json")[0];
    let out = nodal(&c, &["replay", manifest.to_str().unwrap(), "--verify", "--threads", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read(manifest).unwrap(), fs::read(c.join(manifest.file_name().unwrap())).unwrap());
}

#[test]
fn replay_detects_tampered_results_and_rejects_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(nodal(&a, &["kacrice", "--degrees", "3", "--trials", "50", "--seed", "5"]).status.code(), Some(0));
    let manifest = with_ext(&a, ".manifest.json")[0].clone();
    let csv = with_ext(&a, ".csv")[0].clone();
    let out = nodal(&b, &["replay", manifest.to_str().unwrap(), "--seed", "6"]);
    assert_eq!(out.status.code(), Some(2));
    fs::write(&csv, "tampered\n").unwrap();
    let out = nodal(&b, &["replay", manifest.to_str().unwrap(), "--verify"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_record(&out)["error"], "mismatch");
}

#[test]
fn failed_runs_keep_the_manifest() {
    let dir = tempfile::tempdir().unwrap();
    // A quadrature tolerance below double precision exhausts the budget.
    let out = nodal(dir.path(), &["kernel-check", "--N", "2", "--n", "2", "--oracle-pairs", "1", "--oracle-tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_record(&out)["error"], "numerical");
    let manifests = with_ext(dir.path(), ".manifest.json");
    assert_eq!(manifests.len(), 1);
    let m: Value = serde_json::from_str(&fs::read_to_string(&manifests[0]).unwrap()).unwrap();
    assert_eq!(m["status"], "failed");
    assert_eq!(m["results"]["error"]["exit_code"], 1);
}

#[test]
fn output_dir_defaults_to_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_nodal"))
        .args(["packing", "--n", "1", "--radius", "0.5", "--probes", "100"])
        .env("NODAL_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(with_ext(dir.path(), ".csv").len(), 2);
}

#[test]
fn field_dumps_and_meshes() {
    let dir = tempfile::tempdir().unwrap();
    let out = nodal(
        dir.path(),
        &["field-sample", "--n", "3", "--radius", "3", "--resolution", "17", "--count", "2", "--frequencies", "64", "--dump", "--off"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let dumps = with_ext(dir.path(), ".f64");
    assert_eq!(dumps.len(), 2);
    assert_eq!(fs::read(&dumps[0]).unwrap().len(), 17 * 17 * 17 * 8);
    let sidecar: Value = serde_json::from_str(&fs::read_to_string(dumps[0].with_extension("json")).unwrap()).unwrap();
    assert_eq!(sidecar["shape"], serde_json::json!([17, 17, 17]));
    assert_eq!(sidecar["grid"]["resolution"], 17);
    let off = fs::read_to_string(&with_ext(dir.path(), ".off")[0]).unwrap();
    let mut lines = off.lines();
    assert_eq!(lines.next(), Some("OFF"));
    let counts: Vec<usize> = lines.next().unwrap().split(' ').map(|t| t.parse().unwrap()).collect();
    assert_eq!(off.lines().count(), 2 + counts[0] + counts[1]);
    assert!(counts[1] > 0);
}

#[test]
fn every_subcommand_runs_at_small_size() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["kernel-check", "--N", "1", "--n", "1", "--degrees", "10,20", "--oracle-pairs", "5"][..],
        &["field-sample", "--n", "2", "--sampler", "exact", "--resolution", "9"],
        &["barrier", "--model", "polynomial", "--n", "2", "--m", "10", "--R", "3", "--resolution", "33", "--trials", "100"],
        &["barrier", "--n", "3", "--r", "2", "--sigma", "circle", "--R", "2", "--resolution", "17", "--trials", "100", "--frequencies", "64"],
        &["packing", "--n", "2", "--m", "6", "--R", "3", "--assemble", "--resolution", "33", "--trials", "20"],
        &["rkhs-fit", "--centers", "9,17", "--resolution", "41", "--mollifier", "0.5,0.25"],
        &["rkhs-fit", "--n", "2", "--target", "translate:0.5,0.5", "--centers", "3", "--resolution", "11"],
    ] {
        let out = nodal(dir.path(), args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}
