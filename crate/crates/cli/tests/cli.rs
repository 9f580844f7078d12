use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_openimage")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("openimage-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn pgl2_q3_has_order_24() {
    let o = run(&["pgl2", "--q", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l == "# group order 24"));
    let whole: Vec<&str> = out.lines().filter(|l| l.ends_with(",24,1")).collect();
    assert_eq!(whole, ["S4,24,1"]);
}

#[test]
fn verify_passes() {
    let o = run(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!stdout(&o).contains(",fail,"));
}

#[test]
fn unknown_subcommand_exits_1_with_usage() {
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn missing_spec_is_an_error() {
    assert_eq!(run(&["group"]).status.code(), Some(1));
    assert_eq!(run(&["group", "--spec", "/definitely/not/here.json"]).status.code(), Some(1));
}

#[test]
fn unstable_core_exits_2() {
    let dir = scratch("torus");
    let path = dir.join("torus.json");
    let doc = r#"{"kind": "tower", "ell": 3, "rank": 2, "level": 3,
        "generators": [[[2, 0], [0, 1]], [[1, 0], [0, 2]], [[1, 1], [0, 1]]],
        "subgroups": {"C": [[[2, 0], [0, 1]], [[1, 0], [0, 2]]], "I": [[[1, 1], [0, 1]]]}}"#;
    std::fs::write(&path, doc).unwrap();
    let o = run(&["doublecosets", "--spec", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reports_are_deterministic_and_tagged() {
    let a = run(&["covers", "--example", "wild_borel3", "--level", "3"]);
    let b = run(&["covers", "--example", "wild_borel3", "--level", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let out = stdout(&a);
    let head: Vec<&str> = out.lines().take(3).collect();
    assert!(head[0].starts_with("# openimage "));
    assert!(head[1].starts_with("# spec sha256 ") && head[1].len() == "# spec sha256 ".len() + 64);
    assert_eq!(head[2], "# level 3");
}

#[test]
fn out_dir_receives_csv() {
    let dir = scratch("out");
    let o = run(&["doublecosets", "--example", "borel3", "--level", "3", "--oracle", "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let csv = std::fs::read_to_string(dir.join("doublecosets.csv")).unwrap();
    assert!(csv.lines().any(|l| l == "3,162,324,1,2,1,2"));
}
