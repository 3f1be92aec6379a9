use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn ost(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ost"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("spawn ost")
}

fn ost_bare(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ost")).args(args).output().expect("spawn ost")
}

fn only_file(dir: &Path) -> PathBuf {
    let mut files: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(files.len(), 1, "{files:?}");
    files.pop().unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn curve_g24_has_61_rows_and_monotone_tv() {
    let dir = tempfile::tempdir().unwrap();
    let out = ost(dir.path(), &["curve", "--m", "2", "--n", "4", "--t-max", "60", "--seed", "9"]);
    assert!(out.status.success());
    let path = only_file(dir.path());
    assert_eq!(path.file_name().unwrap(), "curve_m2_n4_seed9.csv");
    let rows = csv_rows(&path);
    assert_eq!(rows.len(), 61);
    let tv: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(tv.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("t_mix(1/4) tv") && stdout.contains("t_mix(1/4) sep") && stdout.contains("n ln n"));
}

#[test]
fn curve_trivial_group_is_flat_zero() {
    let dir = tempfile::tempdir().unwrap();
    assert!(ost(dir.path(), &["curve", "--m", "1", "--n", "1"]).status.success());
    for row in csv_rows(&only_file(dir.path())) {
        assert_eq!(row[1].parse::<f64>().unwrap(), 0.0);
        assert_eq!(row[2].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn curve_over_cap_exits_2_and_names_cap() {
    let dir = tempfile::tempdir().unwrap();
    let out = ost(dir.path(), &["curve", "--m", "2", "--n", "8"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("10321920") && err.contains("1048576"), "{err}");
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn curve_json_summary() {
    let dir = tempfile::tempdir().unwrap();
    assert!(ost(dir.path(), &["curve", "--m", "1", "--n", "2", "--format", "json"]).status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(only_file(dir.path())).unwrap()).unwrap();
    assert_eq!(v["t_mix_quarter_tv"], 2);
    assert_eq!(v["t_mix_quarter_sep"], 3);
}

#[test]
fn projection_check_examples() {
    let dir = tempfile::tempdir().unwrap();
    let out = ost(dir.path(), &["projection-check", "--m", "3", "--n", "3", "--t-max", "10"]);
    assert!(out.status.success());
    for row in csv_rows(&only_file(dir.path())) {
        assert!(row[1].parse::<f64>().unwrap() < 1e-12);
    }

    let dir = tempfile::tempdir().unwrap();
    assert!(ost(dir.path(), &["projection-check", "--m", "1", "--n", "4"]).status.success());
    for row in csv_rows(&only_file(dir.path())) {
        assert_eq!(row[1].parse::<f64>().unwrap(), 0.0);
    }

    let dir = tempfile::tempdir().unwrap();
    let out = ost(dir.path(), &["projection-check", "--m", "2", "--n", "4", "--t-max", "5"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn sst_single_card_never_exceeds() {
    let dir = tempfile::tempdir().unwrap();
    assert!(ost(dir.path(), &["sst", "--n", "1", "--c", "1", "--trials", "100"]).status.success());
    let rows = csv_rows(&only_file(dir.path()));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][2], "1");
    assert_eq!(rows[0][4], "0");
    assert_eq!(rows[0][5].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn sst_default_grid_and_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = ost(dir.path(), &["sst", "--n", "100", "--trials", "20000"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let path = only_file(dir.path());
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("n,c,t,trials,exceed,p_hat,stderr,bound_e_minus_c\n"));
    let cs: Vec<f64> = csv_rows(&path).iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(cs, [0.5, 1.0, 2.0, 3.0, 5.0]);
}

#[test]
fn sst_json_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = ost(dir.path(), &["sst", "--n", "10", "--c", "1", "--c", "2", "--trials", "1000", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(only_file(dir.path())).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(v[1]["estimate"]["t"], 44);
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(ost(dir.path(), &["curve", "--m", "0", "--n", "3"]).status.code(), Some(2));
    assert_eq!(ost(dir.path(), &["sst", "--n", "5", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(ost(dir.path(), &["sst", "--n", "5", "--c", "-1"]).status.code(), Some(2));
    assert_eq!(ost(dir.path(), &["curve", "--m", "2"]).status.code(), Some(2));
}

#[test]
fn selftest_quick_and_full() {
    let out = ost_bare(&["selftest", "--quick"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("512 triples"));
    assert!(ost_bare(&["selftest"]).status.success());
}

#[test]
fn trace_lists_generators() {
    let dir = tempfile::tempdir().unwrap();
    assert!(ost(dir.path(), &["trace", "--m", "3", "--n", "5", "--t-max", "25", "--seed", "4"]).status.success());
    let path = only_file(dir.path());
    assert_eq!(path.file_name().unwrap(), "trace_m3_n5_seed4.txt");
    let text = fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().count(), 25);
    for line in text.lines() {
        let (ij, k) = line.split_once('^').unwrap();
        let (i, j) = ij.split_once('-').unwrap();
        let (i, j, k): (u32, u32, u32) = (i.parse().unwrap(), j.parse().unwrap(), k.parse().unwrap());
        assert!(1 <= i && i <= j && j <= 5 && k < 3, "{line}");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let runs: &[&[&str]] = &[
        &["curve", "--m", "2", "--n", "3", "--t-max", "30"],
        &["curve", "--m", "2", "--n", "3", "--format", "json"],
        &["projection-check", "--m", "2", "--n", "3"],
        &["sst", "--n", "50", "--trials", "5000", "--seed", "17"],
        &["sst", "--n", "50", "--trials", "5000", "--seed", "17", "--format", "json"],
        &["trace", "--m", "4", "--n", "6", "--t-max", "40", "--seed", "17"],
    ];
    for args in runs {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        assert!(ost(a.path(), args).status.success());
        assert!(ost(b.path(), args).status.success());
        let (fa, fb) = (only_file(a.path()), only_file(b.path()));
        assert_eq!(fa.file_name(), fb.file_name());
        assert_eq!(fs::read(fa).unwrap(), fs::read(fb).unwrap(), "{args:?}");
    }
}

#[test]
fn different_seeds_give_different_samples() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    ost(a.path(), &["sst", "--n", "30", "--trials", "2000", "--seed", "1"]);
    ost(b.path(), &["sst", "--n", "30", "--trials", "2000", "--seed", "2"]);
    assert_ne!(fs::read(only_file(a.path())).unwrap(), fs::read(only_file(b.path())).unwrap());
}
