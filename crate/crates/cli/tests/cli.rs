use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn waylimit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_waylimit"))
        .args(args)
        .env_remove("WAYLIMIT_THREADS")
        .output()
        .expect("spawn waylimit")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_demo(dir: &Path, name: &str) -> String {
    let o = waylimit(&["demo", name]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, &o.stdout).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn verify_swap_is_noiseless() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_demo(dir.path(), "swap");
    let o = waylimit(&["verify", &model, "--state", "alpha_y"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["eps_sq"].as_f64(), Some(0.0));
    assert!(v["acl_residual"].as_f64().unwrap() < 1e-12);
    assert!(v["yanase_residual"].as_f64().unwrap() > 0.1);
    assert_eq!(v["all_hold"], Value::Bool(true));
}

#[test]
fn verify_trivial_csv() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_demo(dir.path(), "trivial");
    let o = waylimit(&["verify", &model, "--state", "[[0, 0], [1, 0]]", "--csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("eps_sq,noise_variance,"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let eps_sq: f64 = row[0].parse().unwrap();
    assert!((eps_sq - 0.25).abs() < 1e-12);
    assert_eq!(*row.last().unwrap(), "true");
}

#[test]
fn corrupted_unitary_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_demo(dir.path(), "swap");
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&model).unwrap()).unwrap();
    v["U"][0][0] = serde_json::json!([2.0, 0.0]);
    std::fs::write(&model, v.to_string()).unwrap();
    let o = waylimit(&["verify", &model, "--state", "alpha_y"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("U is not unitary"), "{}", stderr(&o));
}

#[test]
fn malformed_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"version\": \"v1\",\n  oops\n}").unwrap();
    let o = waylimit(&["verify", path.to_str().unwrap(), "--state", "alpha_y"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3 column"), "{}", stderr(&o));
}

#[test]
fn missing_file_and_bad_state_exit_one() {
    let o = waylimit(&["verify", "/nonexistent/model.json", "--state", "alpha_y"]);
    assert_eq!(o.status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let model = write_demo(dir.path(), "swap");
    let o = waylimit(&["verify", &model, "--state", "gamma"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("alpha_y"));
}

#[test]
fn demo_models_round_trip() {
    for name in ["swap", "trivial", "yw-sample"] {
        let a = waylimit(&["demo", name]);
        let b = waylimit(&["demo", name]);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
        let v: Value = serde_json::from_slice(&a.stdout).unwrap();
        assert_eq!(v["version"], "v1");
    }
    let o = waylimit(&["demo", "nope"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("swap, trivial, yw-sample"));
}

#[test]
fn oscillator_sweep_bounds() {
    let o = waylimit(&["sweep", "--family", "oscillator", "--sizes", "0,1,10"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("family,size,var_mz,bound,achieved,gap_ratio,seed"));
    let bounds: Vec<f64> = lines
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert_eq!(bounds[0], 0.25);
    assert!((bounds[1] - 0.05).abs() < 1e-16);
    assert!((bounds[2] - 1.0 / 164.0).abs() < 1e-16);
}

#[test]
fn qubit_ladder_sweep() {
    let o = waylimit(&[
        "sweep", "--family", "spin_ladder", "--sizes", "2", "--restarts", "2", "--max-iters", "20",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let row: Vec<String> = stdout(&o).lines().nth(1).unwrap().split(',').map(String::from).collect();
    assert_eq!(row[3].parse::<f64>().unwrap(), 0.125);
    assert!(row[4].parse::<f64>().unwrap() >= 0.125 - 1e-9);
}

#[test]
fn optimize_writes_run_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    std::fs::write(&config, r#"{"restarts": 1, "max_iters": 0}"#).unwrap();
    let out = dir.path().join("run.json");
    let o = waylimit(&["optimize", config.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!((v["final_objective"].as_f64().unwrap() - 0.5).abs() < 1e-15);
    assert_eq!(v["result_model"]["version"], "v1");
}

#[test]
fn optimize_exchange_start_reaches_zero_sup() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    std::fs::write(
        &config,
        r#"{"restarts": 1, "max_iters": 0, "objective": "sup", "observable": "sz", "init": "exchange"}"#,
    )
    .unwrap();
    let o = waylimit(&["optimize", config.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["final_objective"].as_f64().unwrap() < 1e-20);
}

#[test]
fn bad_config_and_oscillator_family_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    std::fs::write(&config, r#"{"restart": 3}"#).unwrap();
    assert_eq!(waylimit(&["optimize", config.to_str().unwrap()]).status.code(), Some(1));
    std::fs::write(&config, r#"{"family": "oscillator"}"#).unwrap();
    assert_eq!(waylimit(&["optimize", config.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn coherent_table() {
    let o = waylimit(&["coherent", "--n-max", "40", "--grid", "0,1", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 5);
    for line in text.lines().skip(1) {
        let err: f64 = line.split(',').nth(6).unwrap().parse().unwrap();
        assert!(err < 1e-6);
    }
    let o = waylimit(&["coherent", "--n-max", "4", "--grid", "2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    assert_eq!(waylimit(&[]).status.code(), Some(1));
    assert_eq!(waylimit(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(waylimit(&["--help"]).status.code(), Some(0));
    assert_eq!(waylimit(&["--version"]).status.code(), Some(0));
}

#[test]
fn invalid_thread_count_exits_one() {
    let o = Command::new(env!("CARGO_BIN_EXE_waylimit"))
        .args(["demo", "swap"])
        .env("WAYLIMIT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("WAYLIMIT_THREADS"));
}
