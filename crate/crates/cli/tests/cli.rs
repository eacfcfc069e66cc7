use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn samples() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../samples")
}

fn linkc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linkc"))
        .args(args)
        .current_dir(samples())
        .env_remove("LINKC_FUEL")
        .output()
        .expect("linkc runs")
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

fn json(o: &Output) -> Value {
    serde_json::from_str(stdout(o).trim()).expect("json output")
}

#[test]
fn check_reports_the_type() {
    let o = linkc(&["check", "empty.stlc"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "empty.stlc: unit");
    let o = linkc(&["check", "e1.stlck"]);
    assert_eq!(stdout(&o).trim(), "e1.stlck: (unit → R^• int) → R^• int");
}

#[test]
fn type_errors_carry_positions() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.stlck");
    std::fs::write(&bad, "(lam x int\n  (deref x))").unwrap();
    let o = linkc(&["check", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(
        stderr(&o).contains("bad.stlck:2:3: error:"),
        "{}",
        stderr(&o)
    );
    let o = linkc(&["--json", "check", bad.to_str().unwrap()]);
    let v = json(&o);
    assert_eq!((v["line"].as_u64(), v["col"].as_u64()), (Some(2), Some(3)));
}

#[test]
fn unannotated_client_is_incompatible() {
    let o = linkc(&["compat", "client.stlck", "counter.lref"]);
    assert_eq!(code(&o), 1);
    let err = stderr(&o);
    assert!(
        err.contains("client.stlck:1:1: error: unit → int is not compatible with unit → int"),
        "{err}"
    );
    assert!(!err.contains("E^"), "chains only under --explain");

    let o = linkc(&["--explain", "compat", "client.stlck", "counter.lref"]);
    let err = stderr(&o);
    let lines: Vec<&str> = err.lines().collect();
    assert!(lines[1].ends_with("unit → E^∘_0 int"), "{err}");
    assert!(lines[2].ends_with("unit → E^•_0 int"), "{err}");

    let v = json(&linkc(&[
        "--json",
        "compat",
        "client.stlck",
        "counter.lref",
    ]));
    assert_eq!(v["verdict"], "incompatible");
    assert_eq!(v["mismatch"][0], "unit → E^∘_0 int");
    assert_eq!(v["mismatch"][1], "unit → E^•_0 int");
}

#[test]
fn annotated_client_is_compatible() {
    let o = linkc(&["compat", "e1.stlck", "counter.lref"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "compatible at unit → E^•_0 int");
    let o = linkc(&[
        "compat",
        "int",
        "int",
        "--client-lang",
        "stlc",
        "--provider-lang",
        "lref",
    ]);
    assert_eq!(code(&o), 0);
}

#[test]
fn compile_writes_code_and_a_usable_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("counter.tgt");
    let o = linkc(&["compile", "counter.lref", "--emit", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(std::fs::read_to_string(&out).unwrap().contains("assign"));
    let side = dir.path().join("counter.json");
    let o = linkc(&["compat", "e1.stlck", side.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = linkc(&["check", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn run_follows_the_counter_scenario() {
    for (manifest, want) in [
        ("counter-e1.json", "1"),
        ("counter-e2.json", "2"),
        ("counter-annotated.json", "1"),
        ("answer.json", "42"),
    ] {
        let o = linkc(&["run", manifest]);
        assert_eq!(
            (code(&o), stdout(&o).trim().to_string()),
            (0, want.to_string()),
            "{manifest}"
        );
    }
    let o = linkc(&["run", "counter-unannotated.json"]);
    assert_eq!(code(&o), 2);
    assert!(
        stderr(&o).starts_with("counter-unannotated.json:7:3: error:"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn fuel_comes_from_the_flag_or_the_environment() {
    let o = linkc(&["run", "counter-e1.json", "--fuel", "3"]);
    assert_eq!(code(&o), 3);
    let o = Command::new(env!("CARGO_BIN_EXE_linkc"))
        .args(["run", "counter-e1.json"])
        .current_dir(samples())
        .env("LINKC_FUEL", "3")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
}

#[test]
fn link_json_embeds_a_readable_manifest() {
    let v = json(&linkc(&["--json", "link", "counter-e1.json"]));
    assert_eq!(v["status"], "ok");
    let m = linkc_core::linker::LinkManifest::from_json(&v["manifest"].to_string()).unwrap();
    assert_eq!(m.main, "(app client counter)");
}

#[test]
fn equiv_reports_witnesses_relative_to_the_suite() {
    let at = "(-> (-> int (R impure int)) (R impure int))";
    let o = linkc(&["equiv", "calls/b.stlc", "calls/c.stlc", "--at", at]);
    assert_eq!(code(&o), 0);
    assert!(
        stdout(&o).contains("distinguished by `count-calls`: 1 vs 2"),
        "{}",
        stdout(&o)
    );
    let o = linkc(&[
        "equiv",
        "calls/a.stlc",
        "calls/b.stlc",
        "--at",
        "(-> (-> int (R pure int)) (R pure int))",
    ]);
    assert!(stdout(&o).contains("not distinguished relative to suite"));
    let o = linkc(&[
        "equiv",
        "calls/a.stlc",
        "calls/c.stlc",
        "--suite",
        "contexts",
        "--at",
        at,
    ]);
    assert!(stdout(&o).contains("0 vs 2"), "{}", stdout(&o));
    let o = linkc(&[
        "equiv",
        "calls/a.stlc",
        "calls/b.stlc",
        "--at",
        "(-> (-> int (R impure int)) (R pure int))",
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn extensions_are_listed_with_kappa_tables() {
    let o = linkc(&["extensions", "list"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    for name in ["heap-effect", "linear", "terminating", "cost"] {
        assert!(s.contains(name));
    }
    assert!(s.contains("λ^ref: int → int ↦κ+ int → R^• int ↦κ− int → int"));
}

#[test]
fn usage_errors_exit_four() {
    assert_eq!(code(&linkc(&["frobnicate"])), 4);
    assert_eq!(code(&linkc(&["check", "missing.stlc"])), 4);
    assert_eq!(code(&linkc(&["check", "README"])), 4);
    assert_eq!(code(&linkc(&["--help"])), 0);
}
