//! End-to-end checks of the command-line contract.

use std::path::Path;
use std::process::Command;

fn staircase() -> Command {
    Command::new(env!("CARGO_BIN_EXE_staircase"))
}

#[test]
fn fit_prints_model_json_on_stdout() {
    let out = staircase()
        .args([
            "fit",
            "--estimator",
            "robust",
            "--n",
            "40",
            "--lambda",
            "0.01",
            "--seed",
            "7",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["kind"], "robust");
    assert_eq!(json["lambda"], 0.01);
    assert_eq!(json["theta"].as_array().unwrap().len(), 32);
}

#[test]
fn unknown_flags_exit_2_with_usage() {
    let out = staircase()
        .args(["fit", "--estimator", "standard", "--wat", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.to_lowercase().contains("usage"), "stderr: {stderr}");
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    std::fs::write(&config, r#"{"params": {"s": 0}}"#).unwrap();
    let out = staircase()
        .args(["sweep", "--config"])
        .arg(&config)
        .args(["--out-dir"])
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let missing = staircase()
        .args(["sweep", "--config", "/nonexistent/config.json"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn sweep_writes_csv_and_tradeoff_svg() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("cfg.json");
    std::fs::write(
        &config,
        r#"{
            "params": {"s": 2, "s0": 2, "delta": 0.1, "epsilon": 0.4, "sigma": 0.1, "m": 1.0},
            "estimators": ["standard", "robust"],
            "sample_sizes": [15],
            "lambda_grid": [0.001, 0.1],
            "trials": 2,
            "mc_samples": 200,
            "base_seed": 3
        }"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = staircase()
        .args(["sweep", "--config"])
        .arg(&config)
        .arg("--out-dir")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("records.csv").exists());
    assert!(out_dir.join("tradeoff.svg").exists());

    let csv = std::fs::read_to_string(out_dir.join("records.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(
        header,
        "estimator_kind,n,lambda,trial_seed,test_mse,train_mse,gen_gap,robust_train_mse,robust_test_mse,norm"
    );
    // 2 estimators × 1 n × 2 λ × 2 trials
    assert_eq!(csv.lines().count() - 1, 8);

    // the plot subcommand consumes the records written by sweep
    let svg_path = dir.path().join("norm.svg");
    let plot = staircase()
        .args(["plot", "--input"])
        .arg(out_dir.join("records.csv"))
        .args(["--quantity", "norm", "--out"])
        .arg(&svg_path)
        .output()
        .unwrap();
    assert_eq!(plot.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&plot.stderr));
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<svg"));
}

#[test]
fn rst_dumps_pseudo_labels() {
    let dir = tempfile::tempdir().unwrap();
    let pseudo = dir.path().join("pseudo.csv");
    let model = dir.path().join("model.json");
    let out = staircase()
        .args([
            "rst",
            "--n",
            "30",
            "--unlabeled",
            "50",
            "--lambda",
            "0.01",
            "--seed",
            "5",
        ])
        .arg("--dump-pseudo")
        .arg(&pseudo)
        .arg("--out")
        .arg(&model)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let text = std::fs::read_to_string(&pseudo).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y_pseudo"));
    assert_eq!(lines.count(), 50);

    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&model).unwrap()).unwrap();
    assert_eq!(json["kind"], "rst");
}

#[test]
fn plot_rejects_unknown_quantity() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("records.csv");
    std::fs::write(&input, "estimator_kind,n\n").unwrap();
    let out = staircase()
        .args(["plot", "--input"])
        .arg(&input)
        .args(["--quantity", "bogus"])
        .arg("--out")
        .arg(dir.path().join("x.svg"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_exits_zero() {
    let out = staircase().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(Path::new(env!("CARGO_BIN_EXE_staircase")).exists());
}
