use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn colon_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/colon.csv")
}

fn write_config(dir: &Path, data: &Path) -> PathBuf {
    let body = serde_json::json!({
        "data": { "path": data, "y_plus": 3.0 },
        "baseline": { "drift": { "type": "random_walk" }, "intensity": { "type": "fixed", "gamma": 5.0 } },
        "sampler": { "chains": 2, "seed": 4, "pdmp": { "total_time": 300.0 } }
    });
    let path = dir.join("run.json");
    std::fs::write(&path, serde_json::to_vec(&body).unwrap()).unwrap();
    path
}

fn dpem(config: &Path, out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dpem"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

#[test]
fn missing_data_file_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &dir.path().join("absent.csv"));
    let out = dpem(&config, &dir.path().join("out"), &["fit"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.csv"));
}

#[test]
fn malformed_data_exits_with_data_code() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("bad.csv");
    std::fs::write(&data, "time,status\n1.0,1\noops,0\n").unwrap();
    let config = write_config(dir.path(), &data);
    let out = dpem(&config, &dir.path().join("out"), &["fit"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn invalid_override_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &colon_path());
    let out = dpem(&config, &dir.path().join("out"), &["fit", "--set", "sampler.chains=0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn override_changes_the_recorded_run() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &colon_path());
    let out = dir.path().join("out");
    let run = dpem(&config, &out, &["fit", "--set", "sampler.chains=1", "--set", "sampler.pdmp.total_time=100"]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["chains"], 1);
    let draws = std::fs::read_to_string(out.join("draws.csv")).unwrap();
    let rows = draws.lines().filter(|l| !l.starts_with('#')).count() - 1;
    assert_eq!(rows, 100);
}

#[test]
fn summary_is_reproducible_from_stored_draws() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &colon_path());
    let out = dir.path().join("out");
    assert!(dpem(&config, &out, &["fit"]).status.success());
    let first = std::fs::read(out.join("summary.json")).unwrap();
    let hazard = std::fs::read(out.join("hazard.csv")).unwrap();
    assert!(dpem(&config, &out, &["summary"]).status.success());
    assert_eq!(std::fs::read(out.join("summary.json")).unwrap(), first);
    assert_eq!(std::fs::read(out.join("hazard.csv")).unwrap(), hazard);
}

#[test]
fn extrapolation_reaches_the_horizon() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &colon_path());
    let out = dir.path().join("out");
    assert!(dpem(&config, &out, &["fit"]).status.success());
    let run = dpem(&config, &out, &["extrapolate"]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let survival = std::fs::read_to_string(out.join("survival_extrapolated.csv")).unwrap();
    let last = survival.lines().last().unwrap();
    let time: f64 = last.split(',').next().unwrap().parse().unwrap();
    assert!((time - 15.0).abs() < 1e-9, "{last}");
}
