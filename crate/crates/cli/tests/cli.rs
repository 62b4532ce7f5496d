use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cod_core::fixtures::example_433;
use cod_core::io::write_design;

fn cod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cod"))
        .args(args)
        .output()
        .expect("cod binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bounds_n6() {
    let out = cod(&["bounds", "-n", "6"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("max rate: 2/3"));
    assert!(text.contains("min delay: 30"));
}

#[test]
fn worked_example_is_equivalent_to_generated() {
    let dir = tempfile::tempdir().unwrap();
    let ex433 = dir.path().join("ex433.json");
    let g3 = dir.path().join("g3.json");
    fs::write(&ex433, write_design(&example_433())).unwrap();
    assert_eq!(code(&cod(&["generate", "-m", "2", "-o", s(&g3)])), 0);
    let out = cod(&["equivalent", s(&ex433), s(&g3)]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "true");
}

#[test]
fn inequivalent_designs_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let g3 = dir.path().join("g3.json");
    let g5 = dir.path().join("g5.json");
    assert_eq!(code(&cod(&["generate", "-m", "2", "-o", s(&g3)])), 0);
    assert_eq!(code(&cod(&["generate", "-m", "3", "-o", s(&g5)])), 0);
    let out = cod(&["equivalent", s(&g3), s(&g5)]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout(&out).trim(), "false");
}

#[test]
fn extend_odd_writes_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("c3.json");
    assert_eq!(
        code(&cod(&["extend", "-m", "3", "--certificate", s(&cert)])),
        1
    );
    let text = fs::read_to_string(&cert).unwrap();
    assert!(text.starts_with(r#"{"format":"cod-parity-certificate","version":1,"m":3"#));
    assert_eq!(code(&cod(&["verify", "--certificate", s(&cert)])), 0);

    // flipping one parity breaks the certificate
    let broken = dir.path().join("broken.json");
    let first = text.find(r#""parity":"#).unwrap() + 9;
    let mut bytes = text.into_bytes();
    bytes[first] = if bytes[first] == b'0' { b'1' } else { b'0' };
    fs::write(&broken, bytes).unwrap();
    assert_eq!(code(&cod(&["verify", "--certificate", s(&broken)])), 1);
}

#[test]
fn extend_even_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let ext = dir.path().join("ext.json");
    assert_eq!(code(&cod(&["extend", "-m", "2", "-o", s(&ext)])), 0);
    let out = cod(&["verify", s(&ext), "--numeric", "--seed", "5"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("seed 5"));
}

#[test]
fn broken_design_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let text = write_design(&example_433()).replacen(r#""sign":"-""#, r#""sign":"+""#, 1);
    fs::write(&path, text).unwrap();
    let out = cod(&["verify", s(&path)]);
    assert_eq!(code(&out), 1);
    let analyzed = cod(&["analyze", s(&path)]);
    assert_eq!(code(&analyzed), 0, "zero patterns are untouched");
}

#[test]
fn malformed_files_exit_3_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\"format\":\"cod-design\",\n\"version\":1,\n\"m\":").unwrap();
    let out = cod(&["verify", s(&path)]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let text = write_design(&example_433()).replace(r#""var":"0010""#, r#""var":"00x0""#);
    fs::write(&path, text).unwrap();
    let out = cod(&["canonicalize", s(&path)]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("entry 3"));

    assert_eq!(code(&cod(&["verify", "/nonexistent/design.json"])), 3);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&cod(&["generate"])), 2);
    assert_eq!(code(&cod(&["generate", "-m", "0"])), 2);
    assert_eq!(code(&cod(&["generate", "-m", "9"])), 2);
    assert_eq!(code(&cod(&["bounds", "-n", "0"])), 2);
    assert_eq!(code(&cod(&["frobnicate"])), 2);
}

#[test]
fn canonicalize_rejects_non_family_design() {
    let dir = tempfile::tempdir().unwrap();
    let ext = dir.path().join("ext.json");
    assert_eq!(code(&cod(&["extend", "-m", "2", "-o", s(&ext)])), 0);
    assert_eq!(code(&cod(&["canonicalize", s(&ext)])), 3);
}

#[test]
fn scramble_then_canonicalize_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    let sc = dir.path().join("s.json");
    let log = dir.path().join("s.ops");
    assert_eq!(code(&cod(&["generate", "-m", "3", "-o", s(&g)])), 0);
    let out = cod(&[
        "scramble",
        s(&g),
        "--seed",
        "11",
        "--count",
        "40",
        "-o",
        s(&sc),
        "--log",
        s(&log),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(fs::read_to_string(&log).unwrap().lines().count(), 40);
    let a = stdout(&cod(&["canonicalize", s(&g)]));
    let b = stdout(&cod(&["canonicalize", s(&sc)]));
    assert_eq!(a, b);

    // the same seed reproduces the same file
    let again = dir.path().join("again.json");
    cod(&[
        "scramble",
        s(&g),
        "--seed",
        "11",
        "--count",
        "40",
        "-o",
        s(&again),
    ]);
    assert_eq!(fs::read(&sc).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn export_formats() {
    let dir = tempfile::tempdir().unwrap();
    let ex433 = dir.path().join("ex433.json");
    fs::write(&ex433, write_design(&example_433())).unwrap();
    let latex = stdout(&cod(&["export", s(&ex433), "--format", "latex"]));
    assert!(latex.contains("-z^*_2 & z^*_1 & 0"));
    let csv = stdout(&cod(&["export", s(&ex433), "--format", "csv"]));
    assert_eq!(csv.lines().next(), Some("z1,z2,z3"));
    let json = stdout(&cod(&["export", s(&ex433), "--format", "json"]));
    assert!(json.contains(r#"["0","z3*","-z2*"]"#));
    assert_eq!(code(&cod(&["export", s(&ex433), "--format", "pdf"])), 2);
}

#[test]
fn analyze_json_and_failure() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    assert_eq!(code(&cod(&["generate", "-m", "3", "-o", s(&g)])), 0);
    let out = cod(&["analyze", s(&g), "--json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["block_shape"]["status"], "pass");

    // drop the last row: one zero pattern goes missing
    let text = fs::read_to_string(&g).unwrap();
    let kept: Vec<&str> = text
        .lines()
        .filter(|l| !l.contains(r#""row":15,"#))
        .collect();
    let mut truncated = kept.join("\n").replace(r#""p":15"#, r#""p":14"#);
    truncated = truncated.replace(",\n]}", "\n]}");
    let t = dir.path().join("t.json");
    fs::write(&t, truncated).unwrap();
    assert_eq!(code(&cod(&["analyze", s(&t)])), 1);
}

#[test]
fn enumerate_respects_budget_override() {
    let out = Command::new(env!("CARGO_BIN_EXE_cod"))
        .args(["enumerate", "-p", "4", "-n", "3", "-k", "3"])
        .env("COD_ORACLE_BUDGET", "1000")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds the budget"));

    let out = cod(&["enumerate", "-p", "1", "-n", "2", "-k", "1", "--free"]);
    assert_eq!(code(&out), 1);
    let out = cod(&["enumerate", "-p", "2", "-n", "2", "-k", "2", "--free"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("1 classes"));
}
