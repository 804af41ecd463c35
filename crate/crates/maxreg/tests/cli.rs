//! End-to-end checks of the `maxreg` binary: exit codes, artifact contents,
//! and the shipped demo configurations.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_maxreg")
}

fn run(command: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    Command::new(bin())
        .args([
            command,
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .args(extra)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn json_value(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn scalar_demo_config() -> String {
    std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/configs/demo_scalar.json"
    ))
    .unwrap()
}

#[test]
fn solve_demo_config_meets_residual_target() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "demo.json", &scalar_demo_config());
    let out = dir.path().join("out");
    let output = run("solve", &config, &out, &[]);
    assert!(output.status.success(), "{output:?}");
    let summary = json_value(&out.join("summary.json"));
    let residual = summary["residual"]["sup_rel"].as_f64().unwrap();
    assert!(residual <= 1e-9, "residual {residual}");
    assert!(out.join("u.csv").exists());
    assert!(out.join("components.csv").exists());
    // csv shape: header + one row per node, 17-significant-digit decimals
    let u_csv = std::fs::read_to_string(out.join("u.csv")).unwrap();
    let mut lines = u_csv.lines();
    assert_eq!(lines.next().unwrap(), "t,u0_re,u0_im");
    let first = lines.next().unwrap();
    assert!(first.starts_with("-6.4000000000000000e1,"), "row {first}");
    // meta block embeds hash, grid, and version
    assert!(summary["meta"]["config_sha256"].as_str().unwrap().len() == 64);
    assert_eq!(summary["meta"]["grid"]["n"].as_u64().unwrap(), 4096);
    assert_eq!(summary["meta"]["tool"].as_str().unwrap(), "maxreg");
}

#[test]
fn solve_zero_forcing_reports_zero_norms() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "zero.json",
        r#"{
  "grid": { "t": 64.0, "n": 1024 },
  "pencil": { "dim": 1, "a": [[1.0,0.0]], "b": [[1.0,0.0]], "p": [[0.0,0.0]],
              "chat": { "kind": "zero" } },
  "forcing": { "kind": "zero" }
}"#,
    );
    let out = dir.path().join("out");
    let output = run("solve", &config, &out, &[]);
    assert!(output.status.success());
    let summary = json_value(&out.join("summary.json"));
    assert_eq!(summary["u_l2"].as_f64().unwrap(), 0.0);
    assert_eq!(summary["residual"]["sup"].as_f64().unwrap(), 0.0);
    assert_eq!(summary["component_l2"]["zeroth"].as_f64().unwrap(), 0.0);
}

#[test]
fn malformed_matrix_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "bad.json",
        r#"{
  "grid": { "t": 64.0, "n": 1024 },
  "pencil": { "dim": 2, "a": [[1.0,0.0]], "b": [[1.0,0.0],[0.0,0.0],[0.0,0.0],[1.0,0.0]],
              "p": [[0.0,0.0],[0.0,0.0],[0.0,0.0],[0.0,0.0]], "chat": { "kind": "zero" } },
  "forcing": { "kind": "zero" }
}"#,
    );
    let out = dir.path().join("out");
    let output = run("solve", &config, &out, &[]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("matrix"), "stderr: {stderr}");
}

#[test]
fn broken_json_reports_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "broken.json", "{ \"grid\": { \"t\": 64.0,\n  !");
    let out = dir.path().join("out");
    let output = run("solve", &config, &out, &[]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("line 2"), "stderr: {stderr}");
}

#[test]
fn degenerate_pencil_fails_certification_with_origin_singularity() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "degenerate.json",
        r#"{
  "grid": { "t": 64.0, "n": 1024 },
  "pencil": { "dim": 1, "a": [[0.0,0.0]], "b": [[1.0,0.0]], "p": [[0.0,0.0]],
              "chat": { "kind": "zero" } }
}"#,
    );
    let out = dir.path().join("out");
    let output = run("certify", &config, &out, &[]);
    assert_eq!(output.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("tau = 0"), "stderr: {stderr}");
    // the bundle is still written for inspection
    let bundle = json_value(&out.join("certificates.json"));
    assert_eq!(bundle["hypotheses"]["whole_line_invertible"].as_bool(), Some(false));
}

#[test]
fn jump_convolution_takes_the_singular_path() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "jump.json",
        r#"{
  "grid": { "t": 64.0, "n": 1024 },
  "pencil": { "dim": 1, "a": [[1.0,0.0]], "b": [[1.0,0.0]], "p": [[0.0,0.0]],
              "chat": { "kind": "decomposed",
                        "c0": { "kind": "constant", "matrix": [[0.0,0.0]] },
                        "c1": { "kind": "sign_jump", "matrix": [[0.25,0.0]] } } }
}"#,
    );
    let out = dir.path().join("out");
    let output = run("certify", &config, &out, &[]);
    assert!(output.status.success(), "{output:?}");
    let bundle = json_value(&out.join("certificates.json"));
    assert_eq!(
        bundle["symbols"]["chat_inhomogeneous_order2"]["continuity_at_zero"].as_bool(),
        Some(false)
    );
    assert_eq!(bundle["hypotheses"]["path_smooth_convolution"].as_bool(), Some(false));
    assert_eq!(bundle["hypotheses"]["path_singular_convolution"].as_bool(), Some(true));
    assert_eq!(bundle["zero_node_averaged"].as_bool(), Some(true));
}

#[test]
fn scalar_demo_certifies_on_the_smooth_path() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "demo.json", &scalar_demo_config());
    let out = dir.path().join("out");
    let output = run("certify", &config, &out, &["--grid-n", "1024"]);
    assert!(output.status.success(), "{output:?}");
    let bundle = json_value(&out.join("certificates.json"));
    assert_eq!(bundle["hypotheses"]["path_smooth_convolution"].as_bool(), Some(true));
    for name in ["a", "a0", "a1", "d", "chat_a"] {
        assert_eq!(bundle["symbols"][name]["ok"].as_bool(), Some(true), "{name}");
    }
    assert!(bundle["kernel"]["cz_constant"].as_f64().unwrap() > 0.0);
    assert!(bundle["envelope"]["constant"].as_f64().unwrap() > 0.0);
}

#[test]
fn regularity_two_space_run_produces_reports() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "demo.json", &scalar_demo_config());
    let out = dir.path().join("out");
    let output = run("regularity", &config, &out, &["--grid-n", "1024"]);
    assert!(output.status.success(), "{output:?}");
    assert!(out.join("ratios.csv").exists());
    let constants = json_value(&out.join("constants.json"));
    let entries = constants["constants"].as_array().unwrap();
    // two spaces x four components
    assert_eq!(entries.len(), 8);
    // L^2 rows carry the analytic bound and dominance flag
    let l2_first = entries
        .iter()
        .find(|e| e["space"] == "L^2" && e["component"] == "first_order")
        .unwrap();
    assert_eq!(l2_first["dominated"].as_bool(), Some(true));
    assert!(out.join("plot_space0_first_order.csv").exists());
    assert!(out.join("plot_space1_convolution.csv").exists());
}

#[test]
fn regularity_empty_bank_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "empty.json",
        r#"{
  "grid": { "t": 64.0, "n": 1024 },
  "pencil": { "dim": 1, "a": [[1.0,0.0]], "b": [[1.0,0.0]], "p": [[0.0,0.0]],
              "chat": { "kind": "zero" } },
  "spaces": [ { "kind": "lp", "p": 2.0 } ],
  "bank": { "kind": "zero", "size": 0 }
}"#,
    );
    let out = dir.path().join("out");
    let output = run("regularity", &config, &out, &[]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn weights_demo_matches_factorization_bound() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "demo.json", &scalar_demo_config());
    let out = dir.path().join("out");
    let output = run("weights", &config, &out, &[]);
    assert!(output.status.success(), "{output:?}");
    let summary = json_value(&out.join("weights.json"));
    // kappa = kappa' = 4 at p = 2 on L^2, so the margin bound is 70.4
    assert_eq!(summary["meta"]["kappa"]["kappa"].as_f64().unwrap(), 4.0);
    assert_eq!(summary["meta"]["kappa"]["kappa_dual"].as_f64().unwrap(), 4.0);
    assert!((summary["factorization_bound"].as_f64().unwrap() - 64.0).abs() < 1e-12);
    assert!((summary["bound_with_margin"].as_f64().unwrap() - 70.4).abs() < 1e-12);
    assert_eq!(summary["within_bound"].as_bool(), Some(true));
    assert_eq!(summary["a1_check"]["passes"].as_bool(), Some(true));
    assert!(out.join("w.csv").exists());
}

#[test]
fn weights_exponent_three_emits_the_cubic_bound() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "p3.json",
        r#"{
  "grid": { "t": 64.0, "n": 1024 },
  "weights": {
    "p": 3.0,
    "phi": { "kind": "lp", "p": 3.0 },
    "g": { "kind": "indicator", "from": 0.0, "to": 1.0 },
    "h": { "kind": "indicator", "from": 0.0, "to": 1.0 }
  }
}"#,
    );
    let out = dir.path().join("out");
    let output = run("weights", &config, &out, &[]);
    assert!(output.status.success(), "{output:?}");
    let summary = json_value(&out.join("weights.json"));
    // kappa(L^3) = 3, kappa'(L^(3/2)) = 6: bound = 2^3 * 3^2 * 6 = 432
    let bound = summary["factorization_bound"].as_f64().unwrap();
    assert!((bound - 432.0).abs() < 1e-9, "bound {bound}");
    assert_eq!(summary["within_bound"].as_bool(), Some(true));
}

#[test]
fn weights_zero_input_is_a_mathematical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "zerog.json",
        r#"{
  "grid": { "t": 64.0, "n": 1024 },
  "weights": {
    "p": 2.0,
    "phi": { "kind": "lp", "p": 2.0 },
    "g": { "kind": "zero" },
    "h": { "kind": "indicator", "from": 0.0, "to": 1.0 }
  }
}"#,
    );
    let out = dir.path().join("out");
    let output = run("weights", &config, &out, &[]);
    assert_eq!(output.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("zero input"), "stderr: {stderr}");
}

#[test]
fn weights_reject_lorentz_descriptors() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "lorentz.json",
        r#"{
  "grid": { "t": 64.0, "n": 1024 },
  "weights": {
    "p": 2.0,
    "phi": { "kind": "lorentz", "p": 2.0 },
    "g": { "kind": "indicator", "from": 0.0, "to": 1.0 },
    "h": { "kind": "indicator", "from": 0.0, "to": 1.0 }
  }
}"#,
    );
    let out = dir.path().join("out");
    let output = run("weights", &config, &out, &[]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn memory_demo_solves_and_certifies() {
    let dir = tempfile::tempdir().unwrap();
    let config_body = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/configs/demo_memory.json"
    ))
    .unwrap();
    let config = write_config(dir.path(), "memory.json", &config_body);
    let out_solve = dir.path().join("solve");
    let output = run("solve", &config, &out_solve, &[]);
    assert!(output.status.success(), "{output:?}");
    let summary = json_value(&out_solve.join("summary.json"));
    assert!(summary["residual"]["sup_rel"].as_f64().unwrap() <= 1e-9);
    let out_cert = dir.path().join("cert");
    let output = run("certify", &config, &out_cert, &["--grid-n", "1024"]);
    assert!(output.status.success(), "{output:?}");
}
