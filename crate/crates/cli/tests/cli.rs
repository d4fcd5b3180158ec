use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn waldcat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_waldcat"))
        .args(args)
        .env_remove("WALDCAT_CAPS")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn all_suites_pass_at_size_one() {
    let o = waldcat(&["run", "all", "--size", "1"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o)
        .lines()
        .filter(|l| !l.starts_with("all "))
        .all(|l| l.starts_with("PASS ")));
}

#[test]
fn wald_axioms_on_three_point_sets() {
    let o = waldcat(&[
        "run",
        "wald-axioms",
        "--builtin",
        "finset_pointed",
        "--size",
        "3",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["checks"].as_array().unwrap().len(), 1);
    assert_eq!(r["checks"][0]["status"], "pass");
}

#[test]
fn good_pushouts_through_dimension_two() {
    let o = waldcat(&["run", "cubes", "--n", "2", "--size", "3"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("good-pushouts finset_pointed(3) n=2"));
}

#[test]
fn projection_fault_fails_and_replays() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().to_str().unwrap();
    let o = waldcat(&[
        "run",
        "multiexact",
        "--fault",
        "projection",
        "--witnesses",
        w,
    ]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("kE1"));
    let first = dir.path().join("witness-0.json");
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&first).unwrap()).unwrap();
    let r = waldcat(&["replay", first.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&r), 1);
    let r = json(&r);
    assert_eq!(r[0]["identical"], true);
    assert_eq!(r[0]["rerun"]["witnesses"], saved["result"]["witnesses"]);
}

#[test]
fn saved_report_replays_clean() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = waldcat(&[
        "run",
        "sdot",
        "--size",
        "2",
        "--format",
        "json",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let r = waldcat(&["replay", report.to_str().unwrap()]);
    assert_eq!(code(&r), 0, "{}", stdout(&r));
    assert!(!stdout(&r).contains("verdict changed"));
}

fn dot_nodes(dot: &str) -> Vec<String> {
    dot.lines()
        .map(str::trim)
        .filter(|l| !l.contains("->") && l.ends_with("];"))
        .map(|l| l.split(' ').next().unwrap().trim_matches('"').to_string())
        .collect()
}

#[test]
fn square_exports_as_dot() {
    let o = waldcat(&[
        "export", "cube", "--size", "3", "--n", "2", "--which", "7", "--format", "dot",
    ]);
    assert_eq!(code(&o), 0);
    let dot = stdout(&o);
    assert_eq!(dot_nodes(&dot), vec!["00", "01", "10", "11"]);
    assert_eq!(dot.lines().filter(|l| l.contains("->")).count(), 4);
}

#[test]
fn interval_exports_as_json() {
    let o = waldcat(&["export", "index", "interval", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["objects"], serde_json::json!(["0", "1"]));
    assert_eq!(v["morphisms"].as_array().unwrap().len(), 3);
}

#[test]
fn k0_of_vector_spaces_is_z() {
    let o = waldcat(&[
        "k0",
        "--builtin",
        "vect_fp",
        "--size",
        "2",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["free_rank"], 1);
    assert!(v["invariant_factors"]
        .as_array()
        .unwrap()
        .iter()
        .all(|d| d == 1));
}

#[test]
fn category_files_are_checked_as_tables() {
    let dir = tempfile::tempdir().unwrap();
    let zero = dir.path().join("zero.json");
    let p2 = dir.path().join("p2.json");
    assert_eq!(
        code(&waldcat(&[
            "export",
            "category",
            "--builtin",
            "zero",
            "--format",
            "json",
            "--out",
            zero.to_str().unwrap()
        ])),
        0
    );
    assert_eq!(
        code(&waldcat(&[
            "export",
            "category",
            "--size",
            "2",
            "--format",
            "json",
            "--out",
            p2.to_str().unwrap()
        ])),
        0
    );
    assert_eq!(
        code(&waldcat(&["check-wald", "--file", zero.to_str().unwrap()])),
        0
    );
    // As a bare table the truncation has no room for 1 + 1.
    let o = waldcat(&[
        "check-wald",
        "--file",
        p2.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 1);
    let failing: Vec<Value> = json(&o)["axioms"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|a| !a["witnesses"].as_array().unwrap().is_empty())
        .cloned()
        .collect();
    assert_eq!(failing.len(), 1);
    assert_eq!(failing[0]["axiom"], "W4");
}

#[test]
fn closed_and_pairing_verbs_pass() {
    for args in [
        &[
            "check-closed",
            "--sources",
            "2",
            "--middles",
            "2",
            "--target",
            "2",
        ][..],
        &["check-pairing", "--size", "2", "--n", "2"],
        &["check-p", "--size", "2", "--n", "3"],
        &["compose", "--size", "2", "--blocks", "2,1"],
        &["check-exact", "--sizes", "3,2"],
    ] {
        let o = waldcat(args);
        assert_eq!(code(&o), 0, "{args:?}: {}", stdout(&o));
    }
}

#[test]
fn projection_is_not_exact() {
    let o = waldcat(&[
        "check-exact",
        "--functor",
        "projection",
        "--sizes",
        "2,2",
        "--target",
        "2",
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&waldcat(&["run", "bogus"])), 2);
    assert_eq!(code(&waldcat(&["export", "index", "torus:3"])), 2);
    assert_eq!(code(&waldcat(&["k0", "--builtin", "sheaves"])), 2);
    assert_eq!(
        code(&waldcat(&["run", "all", "--caps", "max_widgets=3"])),
        2
    );
}

#[test]
fn tight_caps_exit_three() {
    let o = Command::new(env!("CARGO_BIN_EXE_waldcat"))
        .args(["run", "cubes", "--size", "3"])
        .env("WALDCAT_CAPS", "max_results=10")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
    let o = waldcat(&[
        "export",
        "cube",
        "--size",
        "3",
        "--n",
        "2",
        "--caps",
        "max_results=10",
    ]);
    assert_eq!(code(&o), 3);
}

#[test]
fn missing_file_is_reported() {
    let o = waldcat(&["replay", Path::new("/nonexistent/w.json").to_str().unwrap()]);
    assert_ne!(code(&o), 0);
}
