//! CLI behavior tests: precedence, file layout, flag plumbing.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qsljc"))
}

#[test]
fn config_file_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "lambda = 8\ntau = 10\n").unwrap();

    // file sets lambda=8; the flag wins
    let out_flag = dir.path().join("with-flag");
    let status = bin()
        .args(["qsl", "--config"])
        .arg(&conf)
        .args(["--lambda", "0.1", "--out"])
        .arg(&out_flag)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(out_flag.join("qsl.csv")).unwrap();
    let row: Vec<&str> = text.lines().nth(2).unwrap().split(',').collect();
    let lambda: f64 = row[1].parse().unwrap();
    assert_eq!(lambda, 0.1);

    // without the flag the file value applies
    let out_file = dir.path().join("no-flag");
    let status = bin()
        .args(["qsl", "--config"])
        .arg(&conf)
        .arg("--out")
        .arg(&out_file)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(out_file.join("qsl.csv")).unwrap();
    let row: Vec<&str> = text.lines().nth(2).unwrap().split(',').collect();
    let lambda: f64 = row[1].parse().unwrap();
    assert_eq!(lambda, 8.0);
}

#[test]
fn fig6_regime_selects_single_file() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["fig6", "--regime", "markovian", "--grid", "6", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.path().join("fig6_markovian.csv").exists());
    assert!(!dir.path().join("fig6_nonmarkovian.csv").exists());
}

#[test]
fn evolve_emits_trajectory_with_oracle_column() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["evolve", "--lambda", "0.1", "--grid", "51", "--oracle", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(dir.path().join("evolve.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "# qsljc v1, gamma=1 units");
    assert_eq!(
        lines.next().unwrap(),
        "t,rho_ee,re_rho_eg,im_rho_eg,rho_gg,p_t,oracle_dev"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 51);
    for row in rows {
        let cols: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        // trace one, population in range, oracle agreement
        assert!((cols[1] + cols[4] - 1.0).abs() < 1e-12);
        assert!((0.0..=1.0).contains(&cols[5]));
        assert!(cols[6] < 1e-6);
    }
}

#[test]
fn coherence_state_flags() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["qsl", "--c0", "0.7071067811865476", "--sz0", "0.5", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(dir.path().join("qsl.csv")).unwrap();
    let row: Vec<&str> = text.lines().nth(2).unwrap().split(',').collect();
    let coherence: f64 = row[10].parse().unwrap();
    assert!((coherence - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);

    // mixing the two state forms is a config error
    let mixed = bin()
        .args(["qsl", "--c0", "0.5", "--rx", "0.5"])
        .output()
        .unwrap();
    assert_eq!(mixed.status.code(), Some(2));
}

#[test]
fn nm_horizon_flag() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["nm", "--lambda", "0.1", "--horizon", "40", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(dir.path().join("nm.csv")).unwrap();
    let row: Vec<&str> = text.lines().nth(2).unwrap().split(',').collect();
    let horizon: f64 = row[2].parse().unwrap();
    let n_intervals: i64 = row[4].parse().unwrap();
    assert_eq!(horizon, 40.0);
    // zeros at 8.242, 22.657, 37.071; the third interval is truncated at 40
    assert_eq!(n_intervals, 3);

    let bad = bin().args(["nm", "--horizon", "never"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn jobs_env_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .env("QSLJC_JOBS", "2")
        .args(["qsl", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.path().join("qsl.csv").exists());

    let bad = bin().env("QSLJC_JOBS", "abc").args(["qsl"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn out_directory_is_created() {
    let dir = tempfile::tempdir().unwrap();
    let nested = dir.path().join("a/b/c");
    let status = bin()
        .args(["qsl", "--out"])
        .arg(&nested)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(nested.join("qsl.csv").exists());
}
