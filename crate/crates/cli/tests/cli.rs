use std::path::Path;
use std::process::{Command, Output};

fn doiforge(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_doiforge"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

#[test]
fn passing_suite_exits_zero_with_one_record_per_trial() {
    let dir = tempfile::tempdir().unwrap();
    let out = doiforge(
        &[
            "verify",
            "thm11",
            "--n",
            "8",
            "--trials",
            "100",
            "--alpha",
            "1",
            "--norm",
            "schatten:2",
            "--seed",
            "42",
            "--out",
            "r",
        ],
        dir.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let jsonl = std::fs::read_to_string(dir.path().join("r/reports.jsonl")).unwrap();
    let records: Vec<doiforge::EstimateReport> = jsonl
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(records.len(), 100);
    assert!(records
        .iter()
        .all(|r| r.pass && r.recheck() && r.params.n == Some(8)));
    let summary = std::fs::read_to_string(dir.path().join("r/summary.csv")).unwrap();
    assert!(summary
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("thm11,100,100,0,"));
}

#[test]
fn failing_records_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    // The theta-scaling record of the fourier suite is a standing failure.
    let out = doiforge(
        &["verify", "fourier", "--seed", "1", "--out", "r"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let summary = std::fs::read_to_string(dir.path().join("r/summary.csv")).unwrap();
    assert!(summary.contains("fourier_theta_scaling,1,0,1,"));
}

#[test]
fn usage_and_config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), "seed = 1\nalpha = -2.0\n").unwrap();
    std::fs::write(dir.path().join("typo.toml"), "sede = 1\n").unwrap();
    for args in [
        &["verify", "thm11"][..],
        &["verify", "thm99", "--seed", "1"],
        &["verify", "thm11", "--seed", "1", "--norm", "schatten:0.3"],
        &["verify", "thm11", "--config", "bad.toml"],
        &["verify", "thm11", "--config", "typo.toml"],
        &["verify", "thm11", "--config", "missing.toml"],
        &["verify", "thm11", "--seed", "x"],
        &["frobnicate"],
    ] {
        assert_eq!(
            doiforge(args, dir.path()).status.code(),
            Some(2),
            "{args:?}"
        );
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.toml"),
        "seed = 3\ntrials = 2\nout = \"from-file\"\n",
    )
    .unwrap();
    let out = doiforge(
        &["verify", "cor12", "--config", "run.toml", "--trials", "4"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let jsonl = std::fs::read_to_string(dir.path().join("from-file/reports.jsonl")).unwrap();
    assert_eq!(jsonl.lines().count(), 4);
    assert!(jsonl.contains("\"seed\":3"));
}

#[test]
fn profiles_and_demo_write_their_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = doiforge(&["profiles", "--quick", "--out", "p"], dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let sech = std::fs::read_to_string(dir.path().join("p/sech_half_profile.csv")).unwrap();
    assert_eq!(sech.lines().count(), 8002);
    for name in [
        "theta_sweep.csv",
        "thm18_order_curve.csv",
        "besov_chain.csv",
    ] {
        assert!(dir.path().join("p").join(name).is_file(), "{name}");
    }
    let out = doiforge(
        &["demo", "periodic", "--N", "50", "--p", "1", "--out", "d"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("cor22"));
    assert!(dir.path().join("d/demo_periodic.json").is_file());
}
