//! End-to-end runs of the `ttc` binary on the bundled fixtures.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ttc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn ttc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ttc")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn check_on_copying_chain_is_functional_json() {
    let o = ttc(&[
        "check",
        &fixture("copying.ttc"),
        "--chain",
        "copy_chain",
        "--max-size",
        "4",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "functional-up-to-bound");
    assert_eq!(v["bound"], 4);
    assert!(v["counterexample"].is_null());
}

#[test]
fn product_written_to_file_runs_with_two_outputs() {
    let n = scratch("n.ttc");
    let o = ttc(&[
        "product",
        &fixture("copying.ttc"),
        "--t1",
        "copy1",
        "--t2",
        "copy2",
        "--output",
        n.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).is_empty());
    let o = ttc(&["run", n.to_str().unwrap(), "--machine", "N", "--input", "a(e)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().collect::<Vec<_>>(), ["f(e,e)", "f(e,e')"]);

    let o = ttc(&["check", n.to_str().unwrap(), "--machine", "N", "--max-size", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("f(e,e')"));
}

#[test]
fn trace_renders_dot() {
    let o = ttc(&[
        "trace",
        &fixture("example1.ttc"),
        "--machine",
        "T",
        "--input",
        "a(a(e))",
        "--format",
        "dot",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let dot = stdout(&o);
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("q0(a(a(e)))"));
}

#[test]
fn gen_output_parses_back() {
    let path = scratch("gen.ttc");
    let o = ttc(&[
        "gen",
        "--seed",
        "7",
        "--stages",
        "3",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let ws = ttc::Workspace::parse(&text).unwrap();
    assert_eq!(ws.chain("random7").unwrap().len(), 3);
    let o = ttc(&["check", path.to_str().unwrap(), "--chain", "random7", "--max-size", "3"]);
    assert!(matches!(o.status.code(), Some(0 | 1)));
}

#[test]
fn errors_exit_with_two() {
    let o = ttc(&["run", &fixture("example1.ttc"), "--machine", "nope", "--input", "e"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    let o = ttc(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}
