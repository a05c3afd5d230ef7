use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use glassyjc::cli::{self, RunConfig};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_glassyjc"));
    c.env_remove(cli::THREADS_ENV);
    c
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn data_rows(text: &str) -> usize {
    text.lines().filter(|l| !l.starts_with('#')).count() - 1
}

#[test]
fn rerun_and_thread_count_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["concurrence", "--disorder", "cauchy:0.1,uniform:0.2", "--samples", "300", "--tmax", "4"];
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "1", "3"].iter().enumerate() {
        let name = format!("c{i}.csv");
        let mut full = vec!["--threads", threads];
        full.extend_from_slice(&args);
        full.extend_from_slice(&["-o", &name]);
        let out = run_in(dir.path(), &full);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push(std::fs::read(dir.path().join(&name)).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn header_parses_back_to_the_run_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["inversion", "--model", "uniform", "--s", "0.0040", "--tmax-tr", "1", "--dt-tr", "0.01"],
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("inversion.csv")).unwrap();
    let parsed = RunConfig::from_header(&text).unwrap();
    let expected = RunConfig::resolve(
        cli::Command::Inversion,
        [("model", "uniform"), ("s", "0.004"), ("tmax-tr", "1"), ("dt-tr", "0.01")],
    )
    .unwrap();
    assert_eq!(parsed, expected);
    assert_eq!(data_rows(&text), 101);
    assert!(text.contains("\nt,t_over_tr,value,spread\n"));
}

#[test]
fn config_file_sits_between_defaults_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.conf"),
        "# coupled settings\ninteraction = xy\nsamples = 7\ntmax = 2\n",
    )
    .unwrap();
    let out = run_in(
        dir.path(),
        &["--config", "run.conf", "coupled", "--samples", "5", "--disorder", "gaussian:0.1", "--json"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("coupled.csv")).unwrap();
    assert!(text.contains("# interaction = xy\n"));
    assert!(text.contains("# samples = 5\n"));
    assert_eq!(data_rows(&text), 41);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("coupled.json")).unwrap()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 41);
    assert_eq!(json["config"]["samples"], "5");
}

#[test]
fn invalid_config_exits_2_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["inversion", "--model", "cauchy", "--s", "0.01", "--estimator", "mean", "--method", "mc"],
    );
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["code"], 2);
    assert_eq!(err["error"], "config");
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none());

    let out = run_in(dir.path(), &["concurrence", "--dt", "0.1", "--tmax", "1"]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("concurrence.csv")).unwrap();
    assert!(text.contains("# @esd = skipped"));

    let out = run_in(dir.path(), &["coupled", "--alpha", "2.0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn region_scan_rows_and_plot_scripts() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "esd-region", "--kind", "discrete", "--grid", "0:0.2:0.1", "--alpha-grid", "0.2:1.0:0.4",
            "--samples", "20", "--horizon", "6", "--plot", "-o", "scan.csv",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("scan.csv")).unwrap();
    assert_eq!(data_rows(&text), 3 * 3 * 3);
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    let names: Vec<String> = files
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    assert_eq!(
        names,
        ["scan.csv", "scan_alpha000.py", "scan_alpha001.py", "scan_alpha002.py", "scan_index.txt"]
    );
}

#[test]
fn unknown_flag_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["inversion", "--nbar", "50", "--jz", "1"]);
    assert_eq!(out.status.code(), Some(2));
}
