use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use emubench_cli::{load_raw64, Sidecar};

fn emubench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_emubench")).args(args).output().expect("binary runs")
}

fn small_adv(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "generate",
        "--scenario",
        "diff_adv",
        "--dims",
        "1",
        "--seed",
        "0",
        "--train-samples",
        "4",
        "--train-steps",
        "5",
        "--test-samples",
        "2",
        "--test-steps",
        "6",
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    emubench(&args)
}

#[test]
fn list_prints_registry() {
    let out = emubench(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.trim_end().ends_with("46 scenarios"));
    let json = emubench(&["list", "--json"]);
    let rows: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 46);
}

#[test]
fn default_recipe_shape_in_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = emubench(&["generate", "--scenario", "diff_adv", "--dims", "1", "--seed", "0", "--split", "train", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let meta = Sidecar::load(&dir.path().join("1d_diff_adv.train.json")).unwrap();
    assert_eq!(meta.shape, vec![50, 51, 1, 160]);
    assert_eq!(meta.canonical_name, "1d_diff_adv");
    let len = fs::metadata(dir.path().join("1d_diff_adv.train.raw64")).unwrap().len();
    assert_eq!(len, 50 * 51 * 160 * 8);
}

#[test]
fn three_dimensional_canonical_name() {
    let dir = tempfile::tempdir().unwrap();
    let out = emubench(&[
        "generate", "--scenario", "diff_burgers", "--dims", "3", "--num-points", "8", "--cutoff", "2",
        "--train-samples", "1", "--train-steps", "1", "--test-samples", "1", "--test-steps", "1",
        "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let meta = Sidecar::load(&dir.path().join("3d_diff_burgers.test.json")).unwrap();
    assert_eq!(meta.canonical_name, "3d_diff_burgers");
}

#[test]
fn unknown_scenario_exits_with_usage_code() {
    let out = emubench(&["generate", "--scenario", "diff_nothing", "--dims", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("diff_nothing"));
}

#[test]
fn divergence_exits_with_code_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = small_adv(dir.path(), &["--gammas=0,0,-500"]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("sample 0"), "{stderr}");
}

#[test]
fn sidecar_alone_reproduces_payload() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(small_adv(a.path(), &["--gammas=0,-4"]).status.success());
    let sidecar = a.path().join("1d_diff_adv.test.json");
    let out = emubench(&["generate", "--from-sidecar", sidecar.to_str().unwrap(), "--out", b.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for split in ["train", "test"] {
        let name = format!("1d_diff_adv.{split}.raw64");
        assert_eq!(fs::read(a.path().join(&name)).unwrap(), fs::read(b.path().join(&name)).unwrap());
    }
}

#[test]
fn config_file_mirrors_flags() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(small_adv(a.path(), &["--num-points", "32", "--cutoff", "3"]).status.success());
    let cfg = b.path().join("run.toml");
    fs::write(
        &cfg,
        format!(
            "scenario = \"diff_adv\"\ndims = 1\nseed = 0\nout = {:?}\n\n[overrides]\nnum_points = 32\ncutoff = 3\ntrain_samples = 4\ntrain_steps = 5\ntest_samples = 2\ntest_steps = 6\n",
            b.path().to_str().unwrap()
        ),
    )
    .unwrap();
    let out = emubench(&["generate", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let name = "1d_diff_adv.train.raw64";
    assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap());
}

#[test]
fn metrics_of_identical_sets_vanish() {
    let dir = tempfile::tempdir().unwrap();
    assert!(small_adv(dir.path(), &[]).status.success());
    let test = dir.path().join("1d_diff_adv.test.raw64");
    let report = dir.path().join("metrics.json");
    let out = emubench(&[
        "metrics", "--pred", test.to_str().unwrap(), "--ref", test.to_str().unwrap(),
        "--metric", "mean_MSE", "--horizon", "3", "--out", report.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(json["reports"][0]["losses"].as_array().unwrap().len(), 6);
    assert_eq!(json["reports"][0]["degenerate"], true);
    assert_eq!(load_raw64(&test).unwrap().num_samples(), 2);
}

#[test]
fn metrics_shape_mismatch_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(small_adv(dir.path(), &[]).status.success());
    let train = dir.path().join("1d_diff_adv.train.raw64");
    let test = dir.path().join("1d_diff_adv.test.raw64");
    let out = emubench(&["metrics", "--pred", train.to_str().unwrap(), "--ref", test.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn experiment_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(
        &cfg,
        "[experiment]\ntrain_samples = 2\ntrain_steps = 20\ntest_samples = 3\ntest_steps = 12\nhorizon = 10\nmethodologies = [\"one\", \"sup;3\"]\n",
    )
    .unwrap();
    let report = dir.path().join("report.json");
    let out = emubench(&["experiment", "--config", cfg.to_str().unwrap(), "--out", report.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(report).unwrap()).unwrap();
    let rows = json["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["label"], "FOU");
    assert_eq!(rows[2]["label"], "sup;3");
}

#[test]
fn bad_methodology_is_usage_error() {
    let out = emubench(&["experiment", "--methodologies", "sup;x"]);
    assert_eq!(out.status.code(), Some(2));
}
