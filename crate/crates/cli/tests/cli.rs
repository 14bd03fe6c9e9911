//! End-to-end checks of the binary: exit codes, emitted files, determinism.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_blackstock")
}

fn repo_config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn run(args: &[&str]) -> std::process::Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn solve_zero_data_exits_zero_with_files() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        r#"{
            "problem": {
                "params": { "a": 1.0, "b": 1.0, "c": 1.0, "s": 1, "b_over_a": 1.0 },
                "domain": { "dimension": 1, "lengths": [3.141592653589793], "bc_kind": "dirichlet" },
                "period": 6.283185307179586,
                "n_temporal_modes": 4,
                "n_spatial_modes": [4]
            }
        }"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let output = run(&[
        "solve",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let solution = std::fs::read_to_string(out_dir.join("solution.csv")).unwrap();
    assert!(solution.starts_with("m,n1,re,im"));
    // zero data produce zero coefficients
    for line in solution.lines().skip(1) {
        assert!(
            line.ends_with(",0,0")
                || line.ends_with(",0,-0")
                || line.ends_with(",-0,0")
                || line.ends_with(",-0,-0")
        );
    }
    let report = std::fs::read_to_string(out_dir.join("report.json")).unwrap();
    assert!(report.contains("\"converged\": true"));
    assert!(out_dir.join("residual_history.csv").exists());
}

#[test]
fn shipped_solve_config_converges() {
    let dir = tempfile::tempdir().unwrap();
    let output = run(&[
        "solve",
        "--config",
        repo_config("solve.json").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "{output:?}");
}

#[test]
fn incompatible_neumann_data_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        r#"{
            "problem": {
                "params": { "a": 1.0, "b": 1.0, "c": 1.0, "s": 1, "b_over_a": 1.0 },
                "domain": { "dimension": 1, "lengths": [3.141592653589793], "bc_kind": "neumann" },
                "period": 6.283185307179586,
                "n_temporal_modes": 4,
                "n_spatial_modes": [4],
                "forcing": [
                    { "amplitude": 0.5, "temporal_mode": 0, "phase": 0.0, "spatial": [0] }
                ]
            }
        }"#,
    )
    .unwrap();
    let output = run(&[
        "solve",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(3), "{output:?}");
}

#[test]
fn compatible_neumann_config_converges() {
    let dir = tempfile::tempdir().unwrap();
    let output = run(&[
        "solve",
        "--config",
        repo_config("solve_neumann_compatible.json")
            .to_str()
            .unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "{output:?}");
}

#[test]
fn malformed_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(&config, r#"{ "problem": { "params": {} } }"#).unwrap();
    let output = run(&[
        "solve",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1), "{output:?}");
}

#[test]
fn invalid_problem_exits_one_with_field_paths() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        r#"{
            "problem": {
                "params": { "a": 1.0, "b": -1.0, "c": 1.0, "s": 1, "b_over_a": 1.0 },
                "domain": { "dimension": 1, "lengths": [3.141592653589793], "bc_kind": "dirichlet" },
                "period": 6.283185307179586,
                "n_temporal_modes": 4,
                "n_spatial_modes": [4]
            }
        }"#,
    )
    .unwrap();
    let output = run(&[
        "solve",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1), "{output:?}");
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(
        stderr.contains("params.b"),
        "diagnostics carry the field path: {stderr}"
    );
}

#[test]
fn huge_amplitude_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        r#"{
            "problem": {
                "params": { "a": 1.0, "b": 1.0, "c": 1.0, "s": 1, "b_over_a": 1.0 },
                "domain": { "dimension": 1, "lengths": [3.141592653589793], "bc_kind": "dirichlet" },
                "period": 6.283185307179586,
                "n_temporal_modes": 6,
                "n_spatial_modes": [6],
                "forcing": [
                    { "amplitude": 1000.0, "temporal_mode": 1, "phase": 0.0, "spatial": [1] }
                ]
            }
        }"#,
    )
    .unwrap();
    let output = run(&[
        "solve",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2), "{output:?}");
}

#[test]
fn resonance_sweep_and_empty_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let output = run(&[
        "resonance-sweep",
        "--config",
        repo_config("resonance_sweep.json").to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let sweep = std::fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    assert!(sweep.starts_with("delta,min_abs_sigma,response_amplitude"));
    assert_eq!(sweep.lines().count(), 5);
    assert!(out_dir.join("symbols.csv").exists());

    // an empty grid still emits the header
    let config = dir.path().join("empty.json");
    let text = std::fs::read_to_string(repo_config("resonance_sweep.json")).unwrap();
    std::fs::write(&config, text.replace("[1e-1, 1e-2, 1e-3, 1e-4]", "[]")).unwrap();
    let out2 = dir.path().join("out2");
    let output = run(&[
        "resonance-sweep",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out2.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let sweep = std::fs::read_to_string(out2.join("sweep.csv")).unwrap();
    assert_eq!(sweep.trim(), "delta,min_abs_sigma,response_amplitude");
}

#[test]
fn mms_runs_and_reports_small_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let output = run(&[
        "mms",
        "--config",
        repo_config("mms.json").to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let table = std::fs::read_to_string(out_dir.join("mms_errors.csv")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "m_modes,n1,rel_ps_error,rel_l2_error");
    assert_eq!(lines.len(), 3);
    for line in &lines[1..] {
        let cols: Vec<&str> = line.split(',').collect();
        let rel_ps: f64 = cols[2].parse().unwrap();
        assert!(rel_ps < 1e-10, "{line}");
    }
}

#[test]
fn mms_rejects_out_of_band_manufactured_solution() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    let text = std::fs::read_to_string(repo_config("mms.json")).unwrap();
    // push one manufactured mode beyond every listed resolution
    std::fs::write(
        &config,
        text.replace("\"spatial\": [3]", "\"spatial\": [17]"),
    )
    .unwrap();
    let output = run(&[
        "mms",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1), "{output:?}");
}

#[test]
fn epsilon_scan_outputs_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    // shrink the shipped grid for speed
    let text = std::fs::read_to_string(repo_config("epsilon_scan.json")).unwrap();
    std::fs::write(
        &config,
        text.replace(
            "[1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0]",
            "[1e-6, 1e-3]",
        ),
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let output = run(&[
        "epsilon-scan",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--workers",
        "2",
    ]);
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let threshold: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("threshold.json")).unwrap())
            .unwrap();
    assert_eq!(threshold["largest_converged"], 1e-3);
    assert!(threshold["smallest_diverged"].is_null());
    assert!(out_dir.join("scan.csv").exists());
}

#[test]
fn oracle_compare_matches_fixed_point() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    // the shipped config at a lighter truncation for test speed
    let text = std::fs::read_to_string(repo_config("oracle_compare.json")).unwrap();
    let text = text
        .replace("\"n_temporal_modes\": 16", "\"n_temporal_modes\": 8")
        .replace("[16]", "[8]")
        .replace("\"steps_per_period\": 512", "\"steps_per_period\": 256");
    std::fs::write(&config, text).unwrap();
    let out_dir = dir.path().join("out");
    let output = run(&[
        "oracle-compare",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let cmp: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("comparison.json")).unwrap())
            .unwrap();
    assert!(cmp["rel_l2"].as_f64().unwrap() < 1e-4);
    assert!(out_dir.join("trajectory.csv").exists());
}

#[test]
fn oracle_compare_without_periods_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    let text = std::fs::read_to_string(repo_config("oracle_compare.json")).unwrap();
    // one period is not enough for the transient to die out
    let text = text.replace("\"max_periods\": 200", "\"max_periods\": 1");
    std::fs::write(&config, text).unwrap();
    let output = run(&[
        "oracle-compare",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(4), "{output:?}");
}

#[test]
fn scan_output_is_independent_of_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    let text = std::fs::read_to_string(repo_config("epsilon_scan.json")).unwrap();
    std::fs::write(
        &config,
        text.replace(
            "[1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0]",
            "[1e-5, 1e-3, 1e-1]",
        ),
    )
    .unwrap();
    let mut blobs = Vec::new();
    for (name, workers) in [("w1", "1"), ("w4", "4")] {
        let out_dir = dir.path().join(name);
        let output = run(&[
            "epsilon-scan",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--workers",
            workers,
        ]);
        assert_eq!(output.status.code(), Some(0), "{output:?}");
        let mut blob = std::fs::read(out_dir.join("scan.csv")).unwrap();
        blob.extend(std::fs::read(out_dir.join("threshold.json")).unwrap());
        blobs.push(blob);
    }
    assert_eq!(blobs[0], blobs[1]);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut bodies = Vec::new();
    for name in ["a", "b"] {
        let out_dir = dir.path().join(name);
        let output = run(&[
            "solve",
            "--config",
            repo_config("solve.json").to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--seed",
            "0",
        ]);
        assert_eq!(output.status.code(), Some(0));
        let mut blob = std::fs::read(out_dir.join("solution.csv")).unwrap();
        blob.extend(std::fs::read(out_dir.join("report.json")).unwrap());
        blob.extend(std::fs::read(out_dir.join("residual_history.csv")).unwrap());
        bodies.push(blob);
    }
    assert_eq!(bodies[0], bodies[1]);
}
