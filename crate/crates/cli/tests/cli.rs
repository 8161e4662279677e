use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn eh(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eh"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = eh(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
}

fn setup() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("star5.spec"), "C0\nS\nL0\nS\nL0\n").unwrap();
    ok(dir.path(), &["gen", "galaxy", "star5.spec", "-o", "star5.trn"]);
    ok(dir.path(), &["gen", "c5", "-o", "c5.trn"]);
    dir
}

#[test]
fn gen_c5_matrix() {
    let dir = setup();
    let text = fs::read_to_string(dir.path().join("c5.trn")).unwrap();
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 5);
    for j in 0..5 {
        let indeg = rows.iter().filter(|r| r.as_bytes()[j] == b'1').count();
        assert_eq!(indeg, 2);
    }
}

#[test]
fn gen_iterate_sizes() {
    let dir = setup();
    fs::write(dir.path().join("c3.trn"), "trn v1\n3\n010\n001\n100\n").unwrap();
    let out = ok(dir.path(), &["gen", "iterate", "--base", "c3.trn", "-k", "2"]);
    assert_eq!(out.lines().nth(1), Some("9"));
    let big = eh(dir.path(), &["gen", "iterate", "--base", "c3.trn", "-k", "9"]);
    assert_eq!(big.status.code(), Some(4));
}

#[test]
fn random_needs_seed_and_replays() {
    let dir = setup();
    assert_eq!(eh(dir.path(), &["gen", "random", "-n", "40"]).status.code(), Some(2));
    let a = ok(dir.path(), &["gen", "random", "-n", "40", "--seed", "7"]);
    let b = ok(dir.path(), &["gen", "random", "-n", "40", "--seed", "7"]);
    assert_eq!(a, b);
    let c = ok(dir.path(), &["gen", "random", "-n", "40", "--seed", "8"]);
    assert_ne!(a, c);
}

#[test]
fn analyze_reports() {
    let dir = setup();
    let c5 = ok(dir.path(), &["analyze", "c5.trn"]);
    assert_eq!(field(&c5, "prime"), "yes");
    assert_eq!(field(&c5, "p"), "5");
    assert_eq!(field(&c5, "galaxy"), "no");
    assert_eq!(field(&c5, "tr"), "3");
    ok(dir.path(), &["gen", "transitive", "-n", "8", "-o", "t8.trn"]);
    let t8 = ok(dir.path(), &["analyze", "t8.trn"]);
    assert_eq!(field(&t8, "galaxy"), "yes");
    assert_eq!(field(&t8, "tr"), "8");
    let s = ok(dir.path(), &["analyze", "star5.trn"]);
    assert_eq!(field(&s, "star"), "yes");
    assert_eq!(field(&s, "t"), "1");
    assert!(s.contains("star_0=center:"));
}

#[test]
fn analyze_round_trip_keeps_file() {
    let dir = setup();
    let before = fs::read(dir.path().join("star5.trn")).unwrap();
    ok(dir.path(), &["analyze", "star5.trn"]);
    let again = ok(dir.path(), &["gen", "galaxy", "star5.spec"]);
    assert_eq!(before, again.as_bytes());
    assert_eq!(before, fs::read(dir.path().join("star5.trn")).unwrap());
}

#[test]
fn color_transitive_is_one_class() {
    let dir = setup();
    ok(dir.path(), &["gen", "transitive", "-n", "50", "-o", "t50.trn"]);
    let out = ok(dir.path(), &["color", "t50.trn", "--forbidden", "star5.trn", "-o", "classes.txt"]);
    assert_eq!(field(&out, "classes"), "1");
    assert_eq!(field(&out, "within_bound"), "yes");
    let classes = fs::read_to_string(dir.path().join("classes.txt")).unwrap();
    let expect: Vec<String> = (0..50).map(|v| v.to_string()).collect();
    assert_eq!(classes, format!("{}\n", expect.join(" ")));
}

#[test]
fn color_planted_exits_with_embedding() {
    let dir = setup();
    ok(dir.path(), &["gen", "random", "-n", "12", "--seed", "1", "-o", "r.trn"]);
    let mut args = vec!["gen", "substitute", "star5.trn"];
    args.extend(["r.trn"; 5]);
    args.extend(["-o", "planted.trn"]);
    ok(dir.path(), &args);
    let out = eh(dir.path(), &["color", "planted.trn", "--forbidden", "star5.trn"]);
    assert_eq!(out.status.code(), Some(3));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(field(&stdout, "embedding").split(' ').count(), 5);
}

#[test]
fn bounds_outputs() {
    let dir = setup();
    let out = ok(dir.path(), &["bounds", "--h", "5", "--family", "star", "--format", "kv"]);
    let v: f64 = field(&out, "eps_lower").parse().unwrap();
    assert!((v - 1.0 / (15.0 * 10f64.ln())).abs() < 1e-13);
    let table = ok(dir.path(), &["bounds", "star5.trn"]);
    assert!(table.contains("star_formula") && table.contains("prime_formula"));
    let c5 = ok(dir.path(), &["bounds", "c5.trn", "--format", "kv"]);
    assert!(field(&c5, "eps_lower").starts_with("absent"));
    assert_eq!(eh(dir.path(), &["bounds"]).status.code(), Some(2));
}

#[test]
fn certify_is_reproducible() {
    let dir = setup();
    let args = ["certify", "c5.trn", "-n", "30", "--trials", "50", "--seed", "3", "--budget", "30"];
    let a = ok(dir.path(), &args);
    let b = ok(dir.path(), &args);
    assert_eq!(a, b);
    assert_eq!(field(&a, "verified_h_far"), "yes");
    let none = ok(dir.path(), &["certify", "c5.trn", "-n", "30", "--trials", "5", "--seed", "3"]);
    assert_eq!(none.trim(), "certificate=none");
    let cap = eh(dir.path(), &["certify", "c5.trn", "-n", "65", "--seed", "3"]);
    assert_eq!(cap.status.code(), Some(4));
}
