//! End-to-end checks of the `critnet` binary and the command functions.
//!
//! Golden files under `tests/golden` are rewritten when `UPDATE_GOLDEN=1`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use critnet::commands::{
    analyze, fit_avalanche_sizes, simulate, AnalyzeRequest, SimulateRequest, FILE_AVALANCHES,
    FILE_AVALANCHE_CCDF, FILE_DEGREE_CCDF, FILE_EDGES, FILE_INDEX, FILE_MANIFEST, FILE_SUMMARY,
};
use critnet::config::SimOverrides;
use critnet::error::exit;
use critnet_core::criticality::critical_threshold;
use critnet_core::economy::SimConfig;
use critnet_core::export::AVALANCHE_HEADER;
use critnet_core::stats::{EventSize, FitMethod, Xmin};
use sha2::{Digest, Sha256};
use tempfile::TempDir;

const CSVS: [&str; 4] = [FILE_INDEX, FILE_AVALANCHES, FILE_AVALANCHE_CCDF, FILE_DEGREE_CCDF];

fn critnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_critnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn check_golden(name: &str, actual: &[u8]) {
    let path = golden_dir().join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, actual).unwrap();
        return;
    }
    let expected = fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}; rerun with UPDATE_GOLDEN=1", path.display()));
    assert!(expected == actual, "{name} differs from its golden copy");
}

fn small_config() -> SimConfig {
    SimConfig {
        n_agents: 200,
        n_steps: 2000,
        seed: 7,
        ..SimConfig::default()
    }
}

fn run_to(config: SimConfig, dir: &Path) {
    simulate(&SimulateRequest {
        config,
        out: dir.to_path_buf(),
        replicas: 1,
    })
    .unwrap();
}

#[test]
fn small_run_matches_golden_outputs() {
    let tmp = TempDir::new().unwrap();
    run_to(small_config(), tmp.path());
    for name in CSVS.iter().chain(&[FILE_EDGES, FILE_SUMMARY]) {
        check_golden(&format!("small/{name}"), &fs::read(tmp.path().join(name)).unwrap());
    }
}

fn digest_lines(dir: &Path) -> String {
    CSVS.iter()
        .map(|name| {
            let hash = Sha256::digest(fs::read(dir.join(name)).unwrap());
            let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
            format!("{hex}  {name}\n")
        })
        .collect()
}

#[test]
fn default_run_digests_are_stable() {
    let tmp = TempDir::new().unwrap();
    let out = critnet(&["simulate", "--out", tmp.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    check_golden("default.sha256", digest_lines(tmp.path()).as_bytes());
}

#[test]
fn manifest_rerun_is_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let first = tmp.path().join("first");
    let second = tmp.path().join("second");
    run_to(SimConfig { n_agents: 400, n_steps: 10_000, seed: 3, ..SimConfig::default() }, &first);
    let out = critnet(&[
        "simulate",
        "--config",
        first.join(FILE_MANIFEST).to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in CSVS.iter().chain(&[FILE_EDGES]) {
        assert_eq!(fs::read(first.join(name)).unwrap(), fs::read(second.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn zero_steps_gives_header_only_avalanches() {
    let tmp = TempDir::new().unwrap();
    run_to(SimConfig { n_steps: 0, ..small_config() }, tmp.path());
    let text = fs::read_to_string(tmp.path().join(FILE_AVALANCHES)).unwrap();
    assert_eq!(text, format!("{AVALANCHE_HEADER}\n"));
}

fn manifest_value(dir: &Path, key: &str) -> String {
    let text = fs::read_to_string(dir.join(FILE_MANIFEST)).unwrap();
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")).map(str::to_string))
        .unwrap_or_else(|| panic!("{key} missing from manifest"))
}

#[test]
fn auto_threshold_is_recorded_in_manifest() {
    let tmp = TempDir::new().unwrap();
    run_to(small_config(), tmp.path());
    assert_eq!(manifest_value(tmp.path(), "d_th"), "auto");
    let resolved: f64 = manifest_value(tmp.path(), "d_th_resolved").parse().unwrap();
    assert_eq!(resolved, critical_threshold(2.5, 1).unwrap().d_th);
}

#[test]
fn fitted_exponent_round_trips_through_csv() {
    let tmp = TempDir::new().unwrap();
    let config = SimConfig { n_agents: 400, n_steps: 20_000, ..small_config() };
    let direct = critnet_core::economy::run(&config).unwrap();
    let direct_m = fit_avalanche_sizes(&direct.avalanche_sizes()).unwrap().exponent;
    run_to(config, tmp.path());
    let mut rdr = csv::Reader::from_path(tmp.path().join(FILE_AVALANCHES)).unwrap();
    let sizes: Vec<f64> = rdr
        .records()
        .map(|r| r.unwrap()[1].parse::<f64>().unwrap())
        .collect();
    let reread_m = fit_avalanche_sizes(&sizes).unwrap().exponent;
    assert!((direct_m - reread_m).abs() < 1e-9);
    let summary = fs::read_to_string(tmp.path().join(FILE_SUMMARY)).unwrap();
    let written: f64 = summary
        .lines()
        .find_map(|l| l.strip_prefix("fitted_m="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((written - direct_m).abs() < 1e-9);
}

#[test]
fn replicas_use_consecutive_seeds() {
    let tmp = TempDir::new().unwrap();
    let summary = simulate(&SimulateRequest {
        config: small_config(),
        out: tmp.path().to_path_buf(),
        replicas: 2,
    })
    .unwrap();
    let seeds: Vec<u64> = summary.runs.iter().map(|r| r.seed).collect();
    assert_eq!(seeds, vec![7, 8]);
    let single = tmp.path().join("single");
    run_to(SimConfig { seed: 8, ..small_config() }, &single);
    let replica = &summary.runs[1].dir;
    assert_eq!(
        fs::read(replica.join(FILE_INDEX)).unwrap(),
        fs::read(single.join(FILE_INDEX)).unwrap()
    );
    assert_eq!(manifest_value(replica, "replica"), "1");
    let back = SimOverrides::from_file(&replica.join(FILE_MANIFEST)).unwrap().resolve().unwrap();
    assert_eq!(back.seed, 8);
}

fn write_series(dir: &Path, closes: &[f64]) -> PathBuf {
    let path = dir.join("series.csv");
    let mut text = String::from("Date,Close\n");
    let start = chrono::NaiveDate::from_ymd_opt(2001, 1, 1).unwrap();
    for (i, c) in closes.iter().enumerate() {
        text.push_str(&format!("{},{c}\n", start + chrono::Days::new(i as u64)));
    }
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn monotone_rising_series_exits_insufficient() {
    let tmp = TempDir::new().unwrap();
    let closes: Vec<f64> = (0..200).map(|i| 100.0 + f64::from(i)).collect();
    let input = write_series(tmp.path(), &closes);
    let out = critnet(&["analyze", "--input", input.to_str().unwrap(), "--out", tmp.path().join("a").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(exit::INSUFFICIENT));
}

#[test]
fn short_series_exits_insufficient() {
    let tmp = TempDir::new().unwrap();
    let input = write_series(tmp.path(), &[10.0, 9.0, 11.0, 8.0]);
    let out = critnet(&["analyze", "--input", input.to_str().unwrap(), "--out", tmp.path().join("a").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(exit::INSUFFICIENT));
}

#[test]
fn malformed_input_exits_data_error() {
    let tmp = TempDir::new().unwrap();
    let input = tmp.path().join("bad.csv");
    fs::write(&input, "Date,Close\n2020-01-03,10\n2020-01-02,11\n").unwrap();
    let out = critnet(&["analyze", "--input", input.to_str().unwrap(), "--out", tmp.path().join("a").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(exit::DATA));
    let out = critnet(&["analyze", "--input", input.to_str().unwrap(), "--close-col", "Last"]);
    assert_eq!(out.status.code(), Some(exit::DATA));
}

#[test]
fn bad_configuration_exits_config_error() {
    let tmp = TempDir::new().unwrap();
    let out_dir = tmp.path().to_str().unwrap();
    for args in [
        vec!["simulate", "--d-th", "1.5", "--out", out_dir],
        vec!["simulate", "--agents", "1", "--out", out_dir],
        vec!["simulate", "--aggregator", "median", "--out", out_dir],
        vec!["predict", "--gamma", "0.5"],
        vec!["predict", "--gamma", "-1"],
    ] {
        assert_eq!(critnet(&args).status.code(), Some(exit::CONFIG), "{args:?}");
    }
}

#[test]
fn predict_reports_threshold_and_exponent() {
    let out = critnet(&["predict", "--gamma", "2.34"]);
    assert_eq!(out.status.code(), Some(exit::OK));
    let text = String::from_utf8(out.stdout).unwrap();
    let value = |key: &str| -> f64 {
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("{key}=")))
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!((value("predicted_m") - 2.51).abs() < 1e-12);
    let s = critical_threshold(2.34, 1).unwrap();
    assert_eq!(value("d_th_critical"), s.d_th);
    let critical = critnet(&["predict", "--gamma", "2.34", "--d-th", &s.d_th.to_string()]);
    assert!(String::from_utf8(critical.stdout).unwrap().contains("regime=critical"));
}

#[test]
fn bundled_sample_lands_in_broad_band() {
    let tmp = TempDir::new().unwrap();
    let input = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/sample_index.csv");
    let report = analyze(&AnalyzeRequest {
        input,
        date_col: "Date".into(),
        close_col: "Close".into(),
        xmin: Xmin::Auto,
        method: FitMethod::Mle,
        size: EventSize::Magnitude,
        out: tmp.path().to_path_buf(),
    })
    .unwrap();
    assert!((2.0..=3.1).contains(&report.fit.exponent), "m = {}", report.fit.exponent);
    for name in ["events.csv", "ccdf.csv", "returns_pdf.csv", "fit.txt"] {
        assert!(tmp.path().join(name).is_file(), "{name}");
    }
}
