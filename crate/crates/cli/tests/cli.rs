use std::path::PathBuf;
use std::process::{Command, Output};

use sechom::chart::{Chart, D2Table};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sechom"))
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("sechom-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn read(dir: &PathBuf, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn ext_on_e1_is_the_diagonal() {
    let dir = scratch("ext");
    let o = run(&["ext", "--fixture", "e1", "--smax", "5", "--tmax", "5", "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let chart = Chart::parse(&read(&dir, "ext.tsv")).unwrap();
    let cells: Vec<(usize, i32, u32, usize)> = chart.rows.iter().map(|r| (r.s, r.t, r.m, r.dim)).collect();
    assert_eq!(cells, (0..=5).map(|s| (s, s as i32, 0, 1)).collect::<Vec<_>>());
    assert!(String::from_utf8(o.stdout).unwrap().contains("t-s"));
}

#[test]
fn every_chart_round_trips() {
    let dir = scratch("round");
    let d = dir.to_str().unwrap();
    for (cmd, fixture) in [("resolve", "exterior"), ("ext", "exterior"), ("secres", "e1"), ("sext", "e1-nonsplit"), ("sext", "z4-plain")] {
        let o = run(&[cmd, "--fixture", fixture, "--smax", "3", "--tmax", "5", "--out", d]);
        assert_eq!(o.status.code(), Some(0), "{cmd} {fixture}: {}", String::from_utf8_lossy(&o.stderr));
        let text = read(&dir, &format!("{cmd}.tsv"));
        assert_eq!(Chart::parse(&text).unwrap().to_tsv(), text, "{cmd} {fixture}");
    }
    let o = run(&["d2", "--fixture", "e1-nonsplit", "--smax", "2", "--tmax", "4", "--out", d]);
    assert_eq!(o.status.code(), Some(0));
    let text = read(&dir, "d2.tsv");
    let table = D2Table::parse(&text).unwrap();
    assert_eq!(table.to_tsv(), text);
    assert!(table.rows.iter().any(|r| r.m == 0 && !r.image.is_empty()));
}

#[test]
fn emitted_complex_is_accepted_back() {
    let dir = scratch("complex");
    let d = dir.to_str().unwrap();
    let o = run(&["secres", "--fixture", "e1-nonsplit", "--smax", "5", "--tmax", "6", "--out", d]);
    assert_eq!(o.status.code(), Some(0));
    let json = dir.join("secres.json");
    let again = scratch("complex-again");
    let o = run(&["secres", "--fixture", "e1-nonsplit", "--smax", "5", "--tmax", "6", "--complex", json.to_str().unwrap(), "--out", again.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read(&dir, "secres.json"), read(&again, "secres.json"));
    let body = |t: String| t.lines().skip(1).map(String::from).collect::<Vec<_>>();
    assert_eq!(body(read(&dir, "secres.tsv")), body(read(&again, "secres.tsv")));
    // the ingested complex also drives d2
    let o = run(&["d2", "--fixture", "e1-nonsplit", "--smax", "2", "--tmax", "4", "--complex", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn empty_class_list_gives_empty_table() {
    let dir = scratch("empty");
    let classes = dir.join("classes.json");
    std::fs::write(&classes, "[]").unwrap();
    let o = run(&["d2", "--fixture", "e1", "--classes", classes.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let t = D2Table::parse(&read(&dir, "d2.tsv")).unwrap();
    assert!(t.rows.is_empty());
}

#[test]
fn verify_is_deterministic_and_passes_on_e1() {
    let a = run(&["verify", "--fixture", "e1", "--seed", "7"]);
    let b = run(&["verify", "--fixture", "e1", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8(a.stdout).unwrap().ends_with("overall\tPASS\n"));
}

#[test]
fn twisted_lift_fails_verification_honestly() {
    let o = run(&["verify", "--fixture", "z4-twisted", "--smax", "2", "--tmax", "4"]);
    assert_eq!(o.status.code(), Some(2));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("sext\tFAIL") && l.contains("d2 d2 != 0")), "{text}");
    let o = run(&["sext", "--fixture", "z4-twisted", "--smax", "2", "--tmax", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_algebra_matches_the_fixture() {
    let dir = scratch("json");
    let alg = dir.join("e1.json");
    std::fs::write(&alg, r#"{"p": 2, "square": false, "basis": [{"name": "1", "degree": 0}, {"name": "x", "degree": 1}], "products": []}"#).unwrap();
    let a = run(&["ext", "--algebra", alg.to_str().unwrap(), "--smax", "4", "--tmax", "4"]);
    let b = run(&["ext", "--fixture", "e1", "--smax", "4", "--tmax", "4"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let body = |o: &Output| String::from_utf8_lossy(&o.stdout).lines().filter(|l| !l.contains("sechom ext")).map(String::from).collect::<Vec<_>>();
    assert_eq!(body(&a), body(&b));
}

#[test]
fn bad_input_exits_with_one() {
    let dir = scratch("bad");
    let alg = dir.join("bad.json");
    std::fs::write(&alg, "{\n  \"p\": 2,\n  \"basis\": [\n").unwrap();
    let o = run(&["ext", "--algebra", alg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"), "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&["ext", "--fixture", "e1", "--smax", "13"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["ext", "--fixture", "nope"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["ext", "--fixture", "e1", "--track", "square"]);
    assert_eq!(o.status.code(), Some(1));
}
