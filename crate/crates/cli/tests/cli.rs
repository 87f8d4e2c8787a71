use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "corpus", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn consfree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_consfree")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn check_sat_is_first_order_cons_free() {
    let o = consfree(&["check", &corpus("sat.atrs"), "--require", "cons-free"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("cons-free: true"));
    assert!(out.contains("type-order: 1"));
}

#[test]
fn check_nonlinear_tm_fails_requirement() {
    let o = consfree(&["check", &corpus("nonlinear_tm.atrs"), "--require", "cons-free"]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    assert!(out.contains("left-linear: false"));
    assert!(out.contains("occurs more than once on the left"));
}

#[test]
fn check_malformed_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.atrs");
    std::fs::write(&bad, "sort symb ;\ncons 0 : symb ;\nrule f 0 -> 0 ;\n").unwrap();
    let o = consfree(&["check", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    let o = consfree(&["check", "/nonexistent/file.atrs"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn check_json() {
    let o = consfree(&["--json", "check", &corpus("succ.atrs")]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["cons_free"], false);
    assert_eq!(v["violations"].as_array().unwrap().len(), 2);
}

#[test]
fn run_succ() {
    let o = consfree(&["run", &corpus("succ.atrs"), "--term", "succ (1;0;1;[])"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().next(), Some("0 ; 1 ; 1 ; []"));
}

#[test]
fn run_sat_finds_true() {
    let o = consfree(&["run", &corpus("sat.atrs"), "--input", "10?#?10#"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().any(|l| l == "true"));
}

#[test]
fn run_budget_exhausted() {
    let o = consfree(&["run", &corpus("succ.atrs"), "--term", "succ (1;0;1;[])", "--max-steps", "1"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("exhausted=true"));
}

#[test]
fn run_json_and_strategy() {
    let o = consfree(&["--json", "run", &corpus("succ.atrs"), "--term", "succ (1;0;1;[])", "--strategy", "innermost"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["normal_forms"], serde_json::json!(["0 ; 1 ; 1 ; []"]));
    assert_eq!(v["exhausted"], false);
}

#[test]
fn solve_majority() {
    let o = consfree(&["solve", &corpus("majority.atrs"), "--basic", "majority (1;0;[])"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "1");
    assert!(lines[1].ends_with("statements=1168"), "{out}");
}

#[test]
fn solve_rejects_non_basic() {
    let o = consfree(&["solve", &corpus("consfree_fsucc.atrs"), "--basic", "ifeq o o (neg 0) 1"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not a basic term"));
}

#[test]
fn solve_second_order_budget() {
    let f = corpus("consfree_fsucc.atrs");
    let o = consfree(&["solve", &f, "--basic", "inc2 (s o) o"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().next(), Some("1"));
    let o = consfree(&["solve", &f, "--basic", "inc2 (s (s (s (s (s o))))) o"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("representation space"));
}

#[test]
fn solve_output_is_thread_independent() {
    let f = corpus("majority.atrs");
    let one = consfree(&["solve", &f, "--basic", "majority (1;0;[])"]);
    let four = consfree(&["--threads", "4", "solve", &f, "--basic", "majority (1;0;[])"]);
    assert_eq!(one.stdout, four.stdout);
    let one = consfree(&["--json", "solve", &f, "--basic", "majority (0;0;1;[])", "--mode", "demand"]);
    let four = consfree(&["--json", "--threads", "4", "solve", &f, "--basic", "majority (0;0;1;[])", "--mode", "demand"]);
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn compile_tm_then_check_and_solve() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("parity.atrs");
    let out = out.to_str().unwrap();
    let o = consfree(&["compile-tm", &corpus("parity.tm"), "--module", "e", "-o", out]);
    assert_eq!(code(&o), 0);
    let o = consfree(&["check", out, "--require", "cons-free"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    for (input, want) in [("1", "true"), ("11", "false")] {
        let o = consfree(&["solve", out, "--input", input, "--mode", "demand"]);
        assert_eq!(code(&o), 0);
        assert_eq!(stdout(&o).lines().next(), Some(want), "input {input}");
    }
}

#[test]
fn compile_tm_pairing_required() {
    let o = consfree(&["compile-tm", &corpus("parity.tm"), "--module", "pipi(e)"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("pairing"));
    let o = consfree(&["compile-tm", &corpus("parity.tm"), "--module", "pipi(e)", "--pairing"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn bad_module_expression_is_usage_error() {
    let o = consfree(&["gen-module", "--module", "prod(lin"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn selftest_module_e() {
    let o = consfree(&["selftest-module", "--module", "e", "--n", "2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "count=8 OK");
}

#[test]
fn simulate_parity() {
    let o = consfree(&["simulate", &corpus("parity.tm"), "--input", "1011"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("accept"));
    let o = consfree(&["simulate", &corpus("parity.tm"), "--input", "1011", "--max-steps", "2"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn unknown_subcommand_is_usage_error() {
    assert_eq!(code(&consfree(&["frobnicate"])), 3);
    assert_eq!(code(&consfree(&["run", &corpus("succ.atrs")])), 3);
}
