use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_catlab"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn stderr_error(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().expect("an error line");
    serde_json::from_str(line).unwrap_or_else(|_| panic!("not JSON: {text}"))
}

const DEMO: &str = r#"
matrix = [2, 1, 1, 1]
T = 2
N = 4096
r_phase = 0.1
r_physical = 0.05

[outputs]
report = "run/report.json"
husimi = "run/h.csv"
state = "run/psi.bin"
"#;

#[test]
fn orbits_lists_two_period_two_orbits() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["orbits", "--matrix", "2,1,1,1", "--T", "2", "--out", "o.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(&dir.path().join("o.json"));
    let list = v.as_array().unwrap();
    assert_eq!(list.len(), 2);
    for o in list {
        assert_eq!(o["T"], 2);
        assert_eq!(o["l"], 5);
    }
    let m = read_json(&dir.path().join("o.json.manifest.json"));
    assert_eq!(m["command"], "orbits");
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(m["config"]["T"], 2);
}

#[test]
fn orbits_to_stdout_still_writes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["orbits", "--matrix", "2,1,1,1", "--T", "3"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    // 16 = 1 + 3 * P(3)
    assert_eq!(v.as_array().unwrap().len(), 5);
    assert!(dir.path().join("catlab-orbits.manifest.json").is_file());
}

#[test]
fn propagator_check_reports_small_defects() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["propagator-check", "--matrix", "2,1,1,1", "--N", "1024", "--out", "p.json"],
    );
    assert!(out.status.success());
    let v = read_json(&dir.path().join("p.json"));
    assert!(v["unitarity_defect"].as_f64().unwrap() < 1e-8);
    assert!(v["egorov_max"].as_f64().unwrap() < 1e-8);
    assert_eq!(v["egorov"].as_array().unwrap().len(), 49);
    assert_eq!(v["pass"], true);
}

#[test]
fn quasimode_run_writes_all_artifacts_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("exp.toml"), DEMO).unwrap();
    let out = run_in(dir.path(), &["quasimode", "--config", "exp.toml"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = dir.path().join("run");
    let report = read_json(&run.join("report.json"));
    for key in [
        "norm_sq",
        "residual",
        "residual_bound",
        "ball_masses",
        "off_support",
        "sup_ratio",
        "inf_ratio",
        "witnesses",
        "scmeasure",
    ] {
        assert!(!report[key].is_null(), "{key} missing");
    }
    assert!(report.get("timings").is_none());
    assert!((report["norm_sq"].as_f64().unwrap() - 2.0).abs() < 0.02);
    assert_eq!(report["ball_masses"].as_array().unwrap().len(), 2);
    let manifest = read_json(&run.join("report.json.manifest.json"));
    assert_eq!(manifest["config"]["N"], 4096);
    assert_eq!(manifest["config"]["G"], 256);
    assert!(manifest["timings"].is_object());
    assert!(run.join("h.csv").is_file() && run.join("h.json").is_file());

    let first = fs::read(run.join("report.json")).unwrap();
    let again = run_in(dir.path(), &["quasimode", "--config", "exp.toml", "--out", "second.json"]);
    assert!(again.status.success());
    assert_eq!(first, fs::read(dir.path().join("second.json")).unwrap());
}

#[test]
fn stored_state_feeds_husimi_and_expect() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("exp.toml"), DEMO).unwrap();
    assert!(run_in(dir.path(), &["quasimode", "--config", "exp.toml"]).status.success());

    let out = run_in(
        dir.path(),
        &["husimi", "--state", "run/psi.bin", "--G", "256", "--out", "h2.csv"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("h2.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 256);
    assert!(rows.iter().all(|r| r.split(',').count() == 256));
    let side = read_json(&dir.path().join("h2.json"));
    assert_eq!(side["G"], 256);
    assert_eq!(side["N"], 4096);
    assert!((side["norm_sq"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    // the stored grid is the one the quasimode run wrote
    assert_eq!(csv, fs::read_to_string(dir.path().join("run/h.csv")).unwrap());

    fs::write(dir.path().join("sym.json"), "[[0, 0, 1, 0], [1, 0, 1, 0]]").unwrap();
    let mut values = Vec::new();
    for mode in ["w", "aw"] {
        let out = run_in(
            dir.path(),
            &["expect", "--state", "run/psi.bin", "--symbol", "sym.json", "--mode", mode],
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        values.push(v["value"][0].as_f64().unwrap());
    }
    // orbit average of 1 + cos 2πp over p ∈ {2/5, 3/5}
    let exact = 1.0 + (0.8 * std::f64::consts::PI).cos();
    for v in &values {
        assert!((v - exact).abs() < 0.01, "{v} vs {exact}");
    }

    fs::write(
        dir.path().join("bump.json"),
        r#"{"kind": "bump", "center": [0.2, 0.4], "r": 0.1}"#,
    )
    .unwrap();
    let out = run_in(
        dir.path(),
        &["expect", "--state", "run/psi.bin", "--symbol", "bump.json", "--mode", "w"],
    );
    assert_eq!(out.status.code(), Some(2));
    let out = run_in(
        dir.path(),
        &["expect", "--state", "run/psi.bin", "--symbol", "bump.json"],
    );
    assert!(out.status.success());
}

#[test]
fn coarse_husimi_grid_is_a_numeric_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("exp.toml"), DEMO).unwrap();
    assert!(run_in(dir.path(), &["quasimode", "--config", "exp.toml"]).status.success());
    let out = run_in(
        dir.path(),
        &["husimi", "--state", "run/psi.bin", "--G", "64", "--out", "h.csv"],
    );
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_error(&out)["error"], "ResolutionTooCoarse");
}

#[test]
fn long_orbit_without_n_reports_guidance() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.toml"), "matrix = [2, 1, 1, 1]\nT = 4\n").unwrap();
    let out = run_in(dir.path(), &["quasimode", "--config", "c.toml"]);
    assert_eq!(out.status.code(), Some(3));
    let e = stderr_error(&out);
    assert_eq!(e["error"], "NTooLarge");
    assert!(e["message"].as_str().unwrap().contains("N explicitly"));
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.toml"), "matrix = [2, 1, 1, 1]\nT = 2\nfoo = 1\n").unwrap();
    let out = run_in(dir.path(), &["quasimode", "--config", "c.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error(&out)["error"], "ConfigError");

    let out = run_in(dir.path(), &["quasimode", "--config", "missing.toml"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run_in(dir.path(), &["orbits", "--matrix", "1,1,1,1", "--T", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error(&out)["error"], "NotUnimodular");

    let out = run_in(dir.path(), &["orbits", "--matrix", "2,1,1", "--T", "2"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run_in(dir.path(), &["selftest", "--only", "11"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn parabolic_matrix_is_a_numeric_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["orbits", "--matrix", "1,1,0,1", "--T", "2"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_error(&out)["error"], "NotHyperbolic");
}

#[test]
fn negative_entries_parse() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["orbits", "--matrix", "-2,-1,-1,-1", "--T", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn sweeps_write_slope_footer() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("width-sweep.toml");
    let out = run_in(dir.path(), &["sweep", "--config", cfg.to_str().unwrap(), "--out", "w.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("w.csv")).unwrap();
    let last = csv.lines().last().unwrap();
    let slope: f64 = last.rsplit(',').next().unwrap().parse().unwrap();
    let lambda = ((3.0 + 5f64.sqrt()) / 2.0).ln();
    assert!((slope / (2.0 * lambda) - 1.0).abs() < 0.05, "{slope}");
    assert!(dir.path().join("w.csv.manifest.json").is_file());

    fs::write(
        dir.path().join("g.toml"),
        "kind = \"waw-gap\"\nmatrix = [2, 1, 1, 1]\nladder = [128, 256, 512]\n",
    )
    .unwrap();
    let out = run_in(dir.path(), &["sweep", "--config", "g.toml"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    let slope: f64 = text.lines().last().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((slope + 1.0).abs() < 0.3, "{slope}");
}

#[test]
fn selftest_subset_passes_and_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["selftest", "--only", "2,5", "--out", "s.json"]);
    assert!(out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("criterion  2 PASS"));
    assert!(err.contains("criterion 10 PASS"));
    let v = read_json(&dir.path().join("s.json"));
    assert_eq!(v["criteria"].as_array().unwrap().len(), 2);
    assert_eq!(v["pass"], true);
    let m = read_json(&dir.path().join("s.json.manifest.json"));
    assert_eq!(m["identical"], true);
}

#[test]
fn thread_cap_flag_and_env_agree() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("exp.toml"), DEMO).unwrap();
    let a = run_in(dir.path(), &["--threads", "1", "quasimode", "--config", "exp.toml", "--out", "a.json"]);
    assert!(a.status.success());
    let b = bin()
        .current_dir(dir.path())
        .env("CATLAB_THREADS", "2")
        .args(["quasimode", "--config", "exp.toml", "--out", "b.json"])
        .output()
        .unwrap();
    assert!(b.status.success());
    assert_eq!(
        fs::read(dir.path().join("a.json")).unwrap(),
        fs::read(dir.path().join("b.json")).unwrap()
    );
}

#[test]
fn help_lists_every_subcommand() {
    let out = bin().arg("--help").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for sub in ["orbits", "propagator-check", "husimi", "expect", "quasimode", "sweep", "selftest", "--threads"] {
        assert!(text.contains(sub), "{sub}");
    }
}

#[test]
fn shipped_configs_parse() {
    for name in ["gap-sweep", "width-sweep", "scmeasure-sweep"] {
        let text = fs::read_to_string(configs().join(format!("{name}.toml"))).unwrap();
        catlab::SweepConfig::from_toml(&text).unwrap();
    }
    let text = fs::read_to_string(configs().join("demo.toml")).unwrap();
    catlab::ExperimentConfig::from_toml(&text).unwrap();
}
