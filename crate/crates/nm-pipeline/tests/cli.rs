//! Black-box tests of the `neuromamba` binary: JSON/CSV outputs, exit
//! codes, and byte-level determinism of written artifacts.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nm_post::Segmentation;
use nm_tensor::Dims;

const BIN: &str = env!("CARGO_BIN_EXE_neuromamba");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("NEUROMAMBA_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stdout);
    let line = text.lines().last().unwrap_or("");
    serde_json::from_str(line).unwrap_or_else(|e| panic!("bad JSON `{}`: {}", line, e))
}

fn stderr_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().unwrap_or("");
    serde_json::from_str(line).unwrap_or_else(|e| panic!("bad JSON `{}`: {}", line, e))
}

fn write_labels(path: &Path, dims: Dims, labels: Vec<u64>) {
    let seg = Segmentation::new(dims, labels).unwrap();
    nm_pipeline::write_label_volume(path, &seg).unwrap();
}

#[test]
fn eval_identical_files_reports_zeros() {
    let dir = tempfile::tempdir().unwrap();
    let gt = dir.path().join("gt");
    let dims = Dims::new(1, 2, 4);
    write_labels(&gt, dims, vec![1, 1, 2, 2, 1, 1, 2, 2]);

    let out = run(&["eval", "--gt", gt.to_str().unwrap(), "--pred", gt.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    for key in ["vi_split", "vi_merge", "vi", "arand"] {
        assert_eq!(v[key].as_f64().unwrap(), 0.0, "{}", key);
    }
}

#[test]
fn scan_bench_reports_full_adjacency_for_hilbert() {
    let out = run(&["scan-bench", "--dims", "4,4,4"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "variant,dims,mean_jump,p95_jump,adjacent_fraction"
    );
    let hilbert = lines
        .find(|l| l.starts_with("hilbert,"))
        .expect("hilbert row present");
    let fields: Vec<&str> = hilbert.split(',').collect();
    assert_eq!(fields[1], "4x4x4");
    assert_eq!(fields[4].parse::<f64>().unwrap(), 1.0);
}

#[test]
fn predict_writes_identical_bytes_for_same_seed_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.json");
    fs::write(
        &cfg,
        "{\"widths\":[2,4],\"n_state\":2,\"chunk\":64,\"block\":[2,8,8]}",
    )
    .unwrap();
    let vol = dir.path().join("vol");
    let out = run(&[
        "gen-synth",
        "--config",
        cfg.to_str().unwrap(),
        "--dims",
        "2,8,8",
        "--n-seeds",
        "3",
        "--out",
        vol.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let mut raws: Vec<Vec<u8>> = Vec::new();
    for (name, seed) in [("a", "5"), ("b", "5"), ("c", "6")] {
        let aff = dir.path().join(name);
        let out = run(&[
            "predict",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            seed,
            "--input",
            vol.to_str().unwrap(),
            "--out",
            aff.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
        raws.push(fs::read(dir.path().join(format!("{}.raw", name))).unwrap());
    }
    assert_eq!(raws[0], raws[1], "same seed, same bytes");
    assert_ne!(raws[0], raws[2], "different seed, different bytes");
}

#[test]
fn oracle_segment_round_trips_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.json");
    fs::write(&cfg, "{\"widths\":[2,4],\"n_state\":2,\"chunk\":64}").unwrap();
    let vol = dir.path().join("vol");
    let out = run(&[
        "gen-synth",
        "--config",
        cfg.to_str().unwrap(),
        "--dims",
        "4,6,6",
        "--n-seeds",
        "4",
        "--out",
        vol.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let gt = dir.path().join("vol_gt");

    let seg = dir.path().join("seg");
    let out = run(&[
        "oracle-seg",
        "--gt",
        gt.to_str().unwrap(),
        "--out",
        seg.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["vi"].as_f64().unwrap(), 0.0);
    assert_eq!(v["arand"].as_f64().unwrap(), 0.0);
    assert_eq!(v["segments"].as_u64().unwrap(), 4);

    let out = run(&[
        "eval",
        "--gt",
        gt.to_str().unwrap(),
        "--pred",
        seg.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["vi"].as_f64().unwrap(), 0.0);
}

#[test]
fn segment_consumes_predicted_affinities() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.json");
    fs::write(
        &cfg,
        "{\"widths\":[2,4],\"n_state\":2,\"chunk\":64,\"block\":[2,8,8]}",
    )
    .unwrap();
    let vol = dir.path().join("vol");
    assert!(run(&[
        "gen-synth",
        "--config",
        cfg.to_str().unwrap(),
        "--dims",
        "2,8,8",
        "--n-seeds",
        "2",
        "--out",
        vol.to_str().unwrap(),
    ])
    .status
    .success());
    let aff = dir.path().join("aff");
    assert!(run(&[
        "predict",
        "--config",
        cfg.to_str().unwrap(),
        "--input",
        vol.to_str().unwrap(),
        "--out",
        aff.to_str().unwrap(),
    ])
    .status
    .success());
    let seg = dir.path().join("seg");
    let out = run(&[
        "segment",
        "--affinities",
        aff.to_str().unwrap(),
        "--out",
        seg.to_str().unwrap(),
        "--theta",
        "0.3",
        "--method",
        "multicut",
        "--merge-stat",
        "quantile75",
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["method"].as_str().unwrap(), "multicut");
    assert!(seg.with_extension("json").exists());
    assert!(seg.with_extension("raw").exists());
}

#[test]
fn missing_input_exits_with_code_3() {
    let out = run(&["eval", "--gt", "/nonexistent/gt.json", "--pred", "/nonexistent/p.json"]);
    assert_eq!(out.status.code(), Some(3));
    let v = stderr_json(&out);
    assert_eq!(v["error"].as_str().unwrap(), "missing-file");
    assert_eq!(v["code"].as_i64().unwrap(), 3);
}

#[test]
fn malformed_header_exits_with_code_4() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    let out = run(&["eval", "--gt", bad.to_str().unwrap(), "--pred", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(stderr_json(&out)["error"].as_str().unwrap(), "malformed-header");
}

#[test]
fn invalid_config_exits_with_code_5() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, "{\"theta\": 7.0}").unwrap();
    let out = run(&["--config", cfg.to_str().unwrap(), "scan-bench", "--dims", "2,2,2"]);
    assert_eq!(out.status.code(), Some(5));
    assert_eq!(stderr_json(&out)["error"].as_str().unwrap(), "config");
}

#[test]
fn unknown_scan_variant_exits_with_code_5() {
    let out = run(&["scan-bench", "--dims", "2,2,2", "--scan-variants", "zigzag"]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn thread_env_fallback_is_validated() {
    let out = Command::new(BIN)
        .args(["scan-bench", "--dims", "2,2,2"])
        .env("NEUROMAMBA_THREADS", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(5));

    let out = Command::new(BIN)
        .args(["scan-bench", "--dims", "2,2,2"])
        .env("NEUROMAMBA_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
}
