//! The `ramsey-canon` binary end to end.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ramsey-canon"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {:?}", out))
}

fn file_hash(path: &Path) -> String {
    hex::encode(Sha256::digest(std::fs::read(path).unwrap()))
}

#[test]
fn verify_axioms_passes_on_small_ellentuck() {
    let out = run(&["verify-axioms", "ellentuck", "N=5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["reports"].as_array().unwrap().len(), 4);
}

#[test]
fn canonize_min_coloring_with_oracle() {
    let out = run(&[
        "canonize",
        "ellentuck",
        "N=6",
        "--front",
        "AU2",
        "--coloring",
        "min",
        "--oracle",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["phi"], serde_json::json!(["keep", "drop"]));
    assert_eq!(v["oracle_agreement"], true);
}

#[test]
fn non_transitive_table_exits_one() {
    let out = run(&[
        "mixing-table",
        "fin",
        "blocks=4",
        "--front",
        "AU2",
        "--coloring",
        "union",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty(), "table render goes to stderr");
    let v = json_of(&out);
    assert_eq!(v["verdict"], "fail");
}

#[test]
fn er_number_values() {
    let out = run(&["er-number", "-n", "1", "-m", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["witness"]["value"], 5);
}

#[test]
fn budget_exhaustion_is_undecided() {
    let out = run(&["er-number", "-n", "1", "-m", "4", "--budget", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(run(&["canonize"]).status.code(), Some(3));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(3));
    assert_eq!(
        run(&["canonize", "ellentuck", "N=5", "--coloring", "nonsense"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        run(&["canonize", "ellentuck", "M=5", "--coloring", "min"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn front_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let front = dir.path().join("front.json");
    let out = run(&[
        "enumerate-front",
        "ellentuck",
        "N=5",
        "--front",
        "AU2",
        "--coloring",
        "max",
        "--out",
        front.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty(), "JSON goes to the file");
    let report: Value = serde_json::from_slice(&std::fs::read(&front).unwrap()).unwrap();
    let stored = dir.path().join("stored.json");
    std::fs::write(&stored, report["witness"].to_string()).unwrap();

    let from_file = run(&["canonize", "ellentuck", "N=5", "--front", stored.to_str().unwrap()]);
    let generated = run(&["canonize", "ellentuck", "N=5", "--front", "AU2", "--coloring", "max"]);
    assert_eq!(from_file.status.code(), Some(0));
    assert_eq!(json_of(&from_file)["phi"], json_of(&generated)["phi"]);
}

#[test]
fn instance_file_matches_positional_form() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("fin.json");
    std::fs::write(&inst, r#"{"instance":"fin","params":{"blocks":3}}"#).unwrap();
    let a = run(&[
        "canonize",
        "--instance",
        inst.to_str().unwrap(),
        "--front",
        "AU1",
        "--coloring",
        "min",
    ]);
    let b = run(&["canonize", "fin", "blocks=3", "--front", "AU1", "--coloring", "min"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..2).map(|i| dir.path().join(format!("run{i}.json"))).collect();
    for p in &paths {
        let out = run(&[
            "lemma-suite",
            "ellentuck",
            "N=5",
            "--front",
            "AU2",
            "--coloring",
            "random",
            "--seed",
            "11",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(matches!(out.status.code(), Some(0..=2)), "{out:?}");
    }
    assert_eq!(file_hash(&paths[0]), file_hash(&paths[1]));
}
