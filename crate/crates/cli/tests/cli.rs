use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use swindle_core::geometry::locate;
use swindle_core::plcore::Rat;

fn swindle(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swindle")).args(args).current_dir(dir).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn build(dir: &Path, extra: &[&str], out: &str) -> Output {
    let mut args = vec!["build", "--out", out];
    args.extend_from_slice(extra);
    swindle(&args, dir)
}

fn factor_count(path: &Path) -> usize {
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    v["factors"].as_array().unwrap().len()
}

#[test]
fn build_writes_certificates_with_the_factor_count_law() {
    let dir = tempfile::tempdir().unwrap();
    let out = build(dir.path(), &["--m", "2", "--q", "1", "--seed", "default", "--delta", "1/8"], "c.json");
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(factor_count(&dir.path().join("c.json")), 4);
    let out = build(dir.path(), &["--m", "3", "--q", "2", "--delta", "1/8"], "c3.json");
    assert_eq!(code(&out), 0);
    assert_eq!(factor_count(&dir.path().join("c3.json")), 8);
}

#[test]
fn build_rejects_bad_input_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&build(dir.path(), &["--m", "2", "--delta", "3/4"], "c.json")), 2);
    assert_eq!(code(&build(dir.path(), &["--m", "2", "--delta", "1/0"], "c.json")), 2);
    assert_eq!(code(&build(dir.path(), &["--m", "2", "--seed", "wide"], "c.json")), 2);
    assert!(!dir.path().join("c.json").exists());
    let ok = build(dir.path(), &["--m", "2", "--seed", "wide", "--fragment-cell", "1/2"], "w.json");
    assert_eq!(code(&ok), 0);
    assert_eq!(factor_count(&dir.path().join("w.json")) % 4, 0);
}

#[test]
fn verify_fresh_certificate_passes() {
    let dir = tempfile::tempdir().unwrap();
    build(dir.path(), &["--m", "2", "--q", "1", "--delta", "1/8"], "c.json");
    let out = swindle(&["verify", "c.json", "--samples", "10000", "--strategy", "stratified"], dir.path());
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("c.json.report.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    assert_eq!(report["product"]["points_checked"], 10000);
    assert_eq!(report["plan"]["samples"], 10000);
}

#[test]
fn verify_tampered_certificate_fails_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    build(dir.path(), &["--m", "2", "--delta", "1/8"], "c.json");
    let path = dir.path().join("c.json");
    let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    v["factors"][0]["exponent"] = serde_json::json!(1);
    fs::write(dir.path().join("t.json"), serde_json::to_string_pretty(&v).unwrap()).unwrap();
    let out = swindle(&["verify", "--cert", "t.json", "--samples", "800", "--report", "r.json"], dir.path());
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).starts_with("FAIL"));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], false);
    assert!(report["product"]["witness"]["point"].is_array());
}

#[test]
fn verify_malformed_input_is_operational() {
    let dir = tempfile::tempdir().unwrap();
    build(dir.path(), &["--m", "2", "--delta", "1/8"], "c.json");
    let text = fs::read_to_string(dir.path().join("c.json")).unwrap();
    fs::write(dir.path().join("cut.json"), &text[..text.len() / 2]).unwrap();
    assert_eq!(code(&swindle(&["verify", "cut.json"], dir.path())), 2);
    assert_eq!(code(&swindle(&["verify", "missing.json"], dir.path())), 2);
    assert_eq!(code(&swindle(&["verify", "c.json", "--samples", "0"], dir.path())), 2);
    assert_eq!(code(&swindle(&["verify"], dir.path())), 2);
}

#[test]
fn identical_configs_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--m", "2", "--q", "2", "--seed", "offset", "--delta", "1/8", "--rng-seed", "9"];
    build(dir.path(), &args, "a.json");
    build(dir.path(), &args, "b.json");
    let a = fs::read(dir.path().join("a.json")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.json")).unwrap());
    for (cert, report) in [("a.json", "ra.json"), ("b.json", "rb.json")] {
        let out = swindle(&["verify", cert, "--samples", "300", "--rng-seed", "4", "--report", report], dir.path());
        assert_eq!(code(&out), 0);
    }
    assert_eq!(fs::read(dir.path().join("ra.json")).unwrap(), fs::read(dir.path().join("rb.json")).unwrap());
}

#[test]
fn inspect_intervals_level_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = swindle(&["inspect", "--intervals", "--level", "2"], dir.path());
    assert_eq!(code(&out), 0);
    let listed: Vec<(String, String)> = rows(&stdout(&out)).into_iter().map(|r| (r[2].clone(), r[3].clone())).collect();
    let expected: Vec<(String, String)> = [(25, 26), (28, 29), (31, 32), (34, 35)]
        .iter()
        .map(|&(a, b)| (Rat::new(a, 12).to_string(), Rat::new(b, 12).to_string()))
        .collect();
    assert_eq!(listed, expected);
}

#[test]
fn inspect_window_map_and_slopes() {
    let dir = tempfile::tempdir().unwrap();
    let out = swindle(&["inspect", "--map", "phi-minus", "--slab", "0"], dir.path());
    assert_eq!(code(&out), 0);
    assert_eq!(
        rows(&stdout(&out)),
        vec![vec!["0/1", "0/1"], vec!["1/3", "7/6"], vec!["2/3", "4/3"], vec!["2/1", "2/1"]]
    );
    let out = swindle(&["inspect", "--slopes", "--map", "phi-minus", "--levels", "8"], dir.path());
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(!text.contains("PASS") && !text.contains("FAIL"));
    let table = rows(&text);
    assert_eq!(table.len(), 8);
    for (i, row) in table.iter().enumerate() {
        assert_eq!(row[0], i.to_string());
        let (lo, hi): (Rat, Rat) = (row[1].parse().unwrap(), row[2].parse().unwrap());
        assert!(lo.is_positive() && lo <= hi);
    }
}

#[test]
fn inspect_rejects_bad_selectors() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["inspect"],
        vec!["inspect", "--intervals"],
        vec!["inspect", "--map", "phi-sideways", "--slab", "0"],
        vec!["inspect", "--slopes", "--levels", "3"],
        vec!["inspect", "--intervals", "--level", "1", "--chain", "1:0"],
        vec!["inspect", "--chain", "2:7"],
    ] {
        assert_eq!(code(&swindle(&args, dir.path())), 2, "{args:?}");
    }
    let out = swindle(&["inspect", "--chain", "2:1"], dir.path());
    assert_eq!(rows(&stdout(&out)), vec![vec!["0", "phi-plus"], vec!["1", "psi-minus"]]);
}

#[test]
fn sample_seed_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = swindle(&["sample", "--func", "seed", "--grid", "32", "--csv"], dir.path());
    assert_eq!(code(&out), 0);
    let table = rows(&stdout(&out));
    assert_eq!(table.len(), 32 * 32);
    let apex = table.iter().find(|r| r[0] == "5/16" && r[1] == "1/2").unwrap();
    assert_eq!(apex[2], "1/1");
}

#[test]
fn sample_sum_is_supported_on_its_balls() {
    let dir = tempfile::tempdir().unwrap();
    let out = swindle(&["sample", "--func", "v1-", "--grid", "64", "--strategy", "stratified"], dir.path());
    assert_eq!(code(&out), 0);
    let mut nonzero = 0;
    for row in rows(&stdout(&out)) {
        if row[2] == "0/1" {
            continue;
        }
        nonzero += 1;
        let p: Vec<Rat> = row[..2].iter().map(|s| s.parse().unwrap()).collect();
        let idx = locate(&p).expect("nonzero value outside every ball");
        assert!(idx.level % 2 == 1 && idx.is_lower_half(), "{row:?} in {idx}");
    }
    assert!(nonzero > 0);
}

#[test]
fn sample_residual_attains_the_shell_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = swindle(&["sample", "--func", "residual:4", "--grid", "64", "--strategy", "stratified"], dir.path());
    assert_eq!(code(&out), 0);
    let max = rows(&stdout(&out)).iter().map(|r| r[2].parse::<Rat>().unwrap().abs()).fold(Rat::zero(), Rat::max);
    assert_eq!(max, Rat::new(1, 32));
}

#[test]
fn sample_rejects_bad_selectors() {
    let dir = tempfile::tempdir().unwrap();
    for f in ["v3+", "u:1:5", "residual", "nonsense"] {
        assert_eq!(code(&swindle(&["sample", "--func", f], dir.path())), 2, "{f}");
    }
}
