use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qrm_core::experiment::ExperimentConfig;
use qrm_core::figures::MANIFEST_NAME;
use qrm_core::output::{parse_config_echo, CSV_HEADER};

fn qrm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn evolve_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rf.csv");
    let svg = dir.path().join("rf.svg");
    let out = qrm(&[
        "evolve",
        "--frame",
        "rf",
        "--n",
        "0",
        "--xi",
        "0",
        "--eps",
        "0.16",
        "--tau-max",
        "10",
        "--steps",
        "5",
        "--out",
        path_str(&csv),
        "--svg",
        path_str(&svg),
        "--column",
        "atomic_excitation",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert_eq!(text.lines().next(), Some(CSV_HEADER));
    assert!(text.lines().nth(1).unwrap().starts_with("0,0.5,1,0,1,1"));
    assert!(fs::read_to_string(&svg).unwrap().contains("<polyline"));
}

#[test]
fn evolve_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let csv = dir.path().join(format!("{name}.csv"));
        let svg = dir.path().join(format!("{name}.svg"));
        let out = qrm(&[
            "evolve",
            "--frame",
            "crf",
            "--n",
            "40",
            "--xi",
            "0.7633587786259541",
            "--steps",
            "300",
            "--out",
            path_str(&csv),
            "--svg",
            path_str(&svg),
            "--column",
            "n_jc",
        ]);
        assert!(out.status.success());
        (fs::read(csv).unwrap(), fs::read(svg).unwrap())
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn config_file_with_flag_override_and_echo_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"frame":"crf","n":3,"xi":0.5,"epsilon":0.3,"tau_max":5.0,"steps":11}"#,
    )
    .unwrap();
    let csv = dir.path().join("out.csv");
    let out = qrm(&[
        "evolve",
        "--config",
        path_str(&cfg),
        "--steps",
        "7",
        "--echo-config",
        "--out",
        path_str(&csv),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(&csv).unwrap();
    let echoed = parse_config_echo(&text).unwrap().unwrap();
    let expected = ExperimentConfig {
        steps: 7,
        ..ExperimentConfig::from_json(&fs::read_to_string(&cfg).unwrap()).unwrap()
    };
    assert_eq!(echoed, expected);
    assert_eq!(text.lines().count(), 1 + 1 + 7);
}

#[test]
fn stdout_when_no_out_path() {
    let out = qrm(&["evolve", "--steps", "3", "--tau-max", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn exit_codes() {
    assert_eq!(qrm(&["evolve", "--steps", "1"]).status.code(), Some(2));
    assert_eq!(qrm(&["evolve", "--eps", "0"]).status.code(), Some(2));
    assert_eq!(
        qrm(&["evolve", "--column", "bogus", "--steps", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(qrm(&["evolve", "--frame", "xyz"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("no").join("such.csv");
    assert_eq!(
        qrm(&["evolve", "--steps", "3", "--out", path_str(&missing)])
            .status
            .code(),
        Some(3)
    );
    let cfg = dir.path().join("absent.json");
    assert_eq!(
        qrm(&["evolve", "--config", path_str(&cfg)]).status.code(),
        Some(3)
    );
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"steps": 1}"#).unwrap();
    let out = qrm(&["evolve", "--config", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("steps"));
}

#[test]
fn figures_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let out = qrm(&["figures", "--outdir", path_str(dir.path())]);
    assert!(out.status.success());
    for k in 1..=14 {
        assert!(dir.path().join(format!("fig{k:02}.csv")).exists());
        assert!(dir.path().join(format!("fig{k:02}.svg")).exists());
    }
    assert!(dir.path().join(MANIFEST_NAME).exists());
}

#[test]
fn verify_subcommand_statuses() {
    let ok = qrm(&["verify"]);
    assert_eq!(
        ok.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ok.stdout)
    );
    let text = String::from_utf8(ok.stdout).unwrap();
    assert!(text.contains("0 failed"));

    let strict = qrm(&["verify", "--tol", "1e-15"]);
    assert_eq!(strict.status.code(), Some(1));
    let text = String::from_utf8(strict.stdout).unwrap();
    assert!(text
        .lines()
        .any(|l| l.starts_with("unitarity/") && l.contains("FAIL")));

    let truncated = qrm(&["verify", "--nmax", "5"]);
    assert_eq!(truncated.status.code(), Some(1));
    assert!(String::from_utf8(truncated.stdout)
        .unwrap()
        .contains("truncation too small"));
}
