//! End-to-end runs of the `intrinsic` binary.

use std::process::{Command, Output};

use intrinsic_codes::codefile::CodeFile;

fn intrinsic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_intrinsic"))
        .args(args)
        .output()
        .unwrap()
}

fn code(args: &[&str]) -> i32 {
    intrinsic(args).status.code().unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let out = intrinsic(args);
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["verify", "--code", "catalog:5-2-2", "--sectors", "1,3"]), 0);
    assert_eq!(code(&["verify", "--code", "catalog:5-2-2", "--sectors", "5"]), 1);
    assert_eq!(
        code(&["verify", "--code", "/nonexistent/code.json", "--sectors", "1"]),
        2
    );
    assert_eq!(code(&["verify", "--code", "catalog:9-9-9", "--sectors", "1"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&["molecular", "--group", "C2", "--ell", "2"]), 0);
    // A well-posed search that cannot converge is a numerical failure.
    assert_eq!(
        code(&["search", "--dim", "2", "--k", "2", "--distance", "2", "--restarts", "2"]),
        3
    );
    assert_eq!(code(&["search", "--dim", "2", "--k", "3", "--distance", "2"]), 2);
}

#[test]
fn verify_reports_residuals() {
    let v = json(&["--json", "verify", "--code", "catalog:5-2-2", "--sectors", "1,3,5"]);
    let text = v.to_string();
    assert!(text.contains("residual"), "{text}");
}

#[test]
fn embed_then_measure_distance_and_depth() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c33.json");
    let p = path.to_str().unwrap();
    assert_eq!(
        code(&["embed", "--code", "catalog:5-2-2", "--space", "3x3", "--out", p]),
        0
    );
    let v = json(&["--json", "distance", "--code", p]);
    assert_eq!(v["kind"], "extrinsic");
    assert_eq!(v["conventional"]["distance"], 1);
    assert_eq!(v["depth"]["depth"], 2);

    let text = std::fs::read_to_string(&path).unwrap();
    let file = CodeFile::from_json(&text).unwrap();
    assert_eq!(file.to_json().unwrap(), text);
    let v = json(&["--json", "verify", "--code", p, "--sectors", "1,3"]);
    assert!(!v.to_string().contains("\"pass\":false"), "{v}");
}

#[test]
fn intrinsic_distance_of_catalog_codes() {
    for (name, d) in [("5-2-2", 2), ("13-2-3", 3), ("14-2-3", 3)] {
        let v = json(&["--json", "distance", "--code", &format!("catalog:{name}")]);
        assert_eq!(v["kind"], "intrinsic");
        assert_eq!(v["distance"], d, "{name}");
    }
}

#[test]
fn search_writes_a_loadable_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("found.json");
    let p = path.to_str().unwrap();
    let args = [
        "search",
        "--dim",
        "5",
        "--k",
        "2",
        "--distance",
        "2",
        "--restarts",
        "4",
        "--seed",
        "3",
        "--out",
        p,
    ];
    assert_eq!(code(&args), 0);
    assert_eq!(code(&["verify", "--code", p, "--sectors", "1,3"]), 0);
}
