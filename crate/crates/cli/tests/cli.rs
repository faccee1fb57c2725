use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hyll_core::kernel::{check_proof, CheckOptions};
use hyll_core::spi::{parse_spi, parse_trace, write_spi};
use hyll_core::text::{parse_certificate, parse_goal_file, write_certificate, write_goal_file};

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn hyll(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyll")).args(args).env_remove("HYLL_FUEL_DEFAULT").output().expect("run hyll")
}

fn hyll_env(args: &[&str], key: &str, val: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyll")).args(args).env(key, val).output().expect("run hyll")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn scratch(dir: &tempfile::TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, contents).unwrap();
    path
}

#[test]
fn golden_files_print_back_identically() {
    let goal = fs::read_to_string(golden("goal.hyll")).unwrap();
    assert_eq!(write_goal_file(&parse_goal_file(&goal).unwrap()), goal);
    for cert in ["init.cert", "swap.cert"] {
        let src = fs::read_to_string(golden(cert)).unwrap();
        assert_eq!(write_certificate(&parse_certificate(&src).unwrap()).unwrap(), src, "{}", cert);
    }
    let spi = fs::read_to_string(golden("cell.spi")).unwrap();
    assert_eq!(write_spi(&parse_spi(&spi).unwrap()), spi);
}

#[test]
fn check_accepts_a_valid_certificate() {
    let o = hyll(&["check", p(&golden("init.cert"))]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("ok"));
    assert_eq!(code(&hyll(&["check", p(&golden("swap.cert"))])), 0);
}

#[test]
fn check_rejects_a_tampered_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let src = fs::read_to_string(golden("swap.cert")).unwrap().replace("split 1", "split 0");
    let o = hyll(&["check", p(&scratch(&dir, "bad.cert", &src))]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("failed at node"), "{}", stdout(&o));
}

#[test]
fn check_reports_syntax_errors_with_locations() {
    let dir = tempfile::tempdir().unwrap();
    let f = scratch(&dir, "bad.cert", "hyll-certificate 1\ndomain unit\nnode 0 init\n  sequent . ; p @ w |- p @\n");
    let o = hyll(&["check", p(&f)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("bad.cert:4:"), "{}", stderr(&o));
    assert_eq!(code(&hyll(&["check", "/nonexistent/file.cert"])), 2);
}

#[test]
fn prove_emits_checkable_certificates() {
    let o = hyll(&["prove", p(&golden("goal.hyll")), "--fuel", "6"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("goal swap: found"));
    assert!(out.contains("goal rho: found"));
    assert!(out.contains("focus"));
    let first = out.find("hyll-certificate").unwrap();
    let end = out[first..].find("goal rho").map(|i| first + i).unwrap();
    let cert = parse_certificate(&out[first..end]).unwrap();
    assert!(check_proof(&cert.proof, &CheckOptions::new(cert.domain)).ok);
}

#[test]
fn prove_zero_exhausts_the_budget() {
    let dir = tempfile::tempdir().unwrap();
    let f = scratch(&dir, "zero.hyll", "goal . ; . |- 0 @ w\n");
    for d in ["unit", "temporal", "rates"] {
        let o = hyll(&["prove", p(&f), "--domain", d]);
        assert_eq!(code(&o), 1);
        assert!(stderr(&o).contains("budget exhausted"), "{}", stderr(&o));
    }
}

#[test]
fn fuel_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let f = scratch(&dir, "dup.hyll", "goal . ; !a @ w |- a * a @ w\n");
    assert_eq!(code(&hyll(&["prove", p(&f)])), 0);
    assert_eq!(code(&hyll_env(&["prove", p(&f)], "HYLL_FUEL_DEFAULT", "1")), 1);
    assert_eq!(code(&hyll_env(&["prove", p(&f), "--fuel", "6"], "HYLL_FUEL_DEFAULT", "1")), 0);
    assert_eq!(code(&hyll_env(&["prove", p(&f)], "HYLL_FUEL_DEFAULT", "lots")), 2);
}

#[test]
fn witnesses_are_parsed() {
    let dir = tempfile::tempdir().unwrap();
    let f = scratch(&dir, "box.hyll", "domain rates\ngoal . ; faw u. (a at u) @ w |- a @ [2]\n");
    assert_eq!(code(&hyll(&["prove", p(&f), "--witness", "[2]"])), 0);
    assert_eq!(code(&hyll(&["prove", p(&f), "--witness", "[2"])), 2);
}

#[test]
fn goal_syntax_errors_are_located() {
    let dir = tempfile::tempdir().unwrap();
    let f = scratch(&dir, "w.hyll", "goal . ; a @ u . |- a @ u\n");
    let o = hyll(&["prove", p(&f)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("w.hyll:1:"), "{}", stderr(&o));
    let f = scratch(&dir, "c.hyll", "goal . ; a <> b @ u |- a @ u\n");
    assert_eq!(code(&hyll(&["prove", p(&f)])), 2);
    assert_eq!(code(&hyll(&["prove", p(&f), "--domain", "hours"])), 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&hyll(&[])), 2);
    assert_eq!(code(&hyll(&["frobnicate"])), 2);
    assert_eq!(code(&hyll(&["selftest", "everything"])), 2);
    assert_eq!(code(&hyll(&["--help"])), 0);
}

#[test]
fn spi_step_and_encode() {
    let f = golden("cell.spi");
    let o = hyll(&["spi", "step", p(&f), "--count", "3"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o).matches("\nstep ").count(), 3);
    let o = hyll(&["spi", "encode", p(&f)]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("# interaction") && out.contains("rt(c) @ [2]") && out.contains("Cell("));
}

#[test]
fn simulate_then_certify() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("run.trace");
    let o = hyll(&["spi", "simulate", p(&golden("cell.spi")), "--seed", "4", "--steps", "3", "--certify", "--out", p(&trace)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(&trace).unwrap();
    assert!(text.contains("# certified ok"));
    assert_eq!(parse_trace(&text).unwrap().len(), 3);
    let o = hyll(&["spi", "certify", p(&golden("cell.spi")), p(&trace)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("focus inter"));
}

#[test]
fn tampered_rate_fails_certification() {
    let dir = tempfile::tempdir().unwrap();
    let spi = scratch(&dir, "tp.spi", "channel x : 4\nchannel a : 1\nrun x!(a).tau(1) | x?(y).y!(y)\n");
    let trace = dir.path().join("tp.trace");
    assert_eq!(code(&hyll(&["spi", "simulate", p(&spi), "--steps", "2", "--out", p(&trace)])), 0);
    let good = fs::read_to_string(&trace).unwrap();
    assert_eq!(code(&hyll(&["spi", "certify", p(&spi), p(&trace)])), 0);

    // Rate edited, world left alone.
    let bad = scratch(&dir, "a.trace", &good.replace("synchronize(x, 4, a)", "synchronize(x, 5, a)"));
    let o = hyll(&["spi", "certify", p(&spi), p(&bad)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("world equation fails at step 1"), "{}", stderr(&o));
    assert!(stderr(&o).contains("a.trace:3:"), "{}", stderr(&o));

    // Rate and every world edited consistently.
    let bad = scratch(&dir, "b.trace", &good.replace("synchronize(x, 4, a)", "synchronize(x, 5, a)").replace("[4", "[5"));
    let o = hyll(&["spi", "certify", p(&spi), p(&bad)]);
    assert_eq!(code(&o), 1);
    let e = stderr(&o);
    assert!(e.contains("world equation") && e.contains("rate 4"), "{}", e);
}

#[test]
fn replications_print_a_frequency_table() {
    let dir = tempfile::tempdir().unwrap();
    let spi = scratch(&dir, "race.spi", "run tau(2) | tau(3)\n");
    let out = dir.path().join("runs");
    let o = hyll(&["spi", "simulate", p(&spi), "--steps", "1", "--runs", "40", "--certify", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("internal(2)") && text.contains("internal(3)"));
    assert!(text.contains("certified 40 of 40"));
    assert_eq!(fs::read_dir(&out).unwrap().count(), 40);
}

#[test]
fn structured_output_is_json() {
    let o = hyll(&["--format", "structured", "check", p(&golden("init.cert"))]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "ok");
    assert_eq!(v["result"]["ok"], true);
    let dir = tempfile::tempdir().unwrap();
    let f = scratch(&dir, "zero.hyll", "goal . ; . |- 0 @ w\n");
    let o = hyll(&["prove", p(&f), "--format", "structured"]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "failed");
    assert_eq!(v["result"]["goals"][0]["found"], false);
}

#[test]
fn spi_binary_is_an_alias() {
    let o = Command::new(env!("CARGO_BIN_EXE_spi")).args(["step", p(&golden("cell.spi"))]).output().unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("step 1"));
}

#[test]
fn selftest_adequacy_passes() {
    let o = hyll(&["selftest", "adequacy"]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("0 failures"));
}
