//! End-to-end tests of the exit-status contract, determinism and golden files.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).to_string_lossy().into_owned()
}

fn qpbkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpbkit")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn corpus_files_pass_every_suite() {
    for f in ["m2_checkerboard.toml", "point_bundle.toml", "trivial_bundle.toml", "z4_calculus.toml", "s3_group_algebra.toml"] {
        let o = qpbkit(&["run", "--suite", "all", "--input", &fixture(f)]);
        assert_eq!(code(&o), 0, "{f}: {}", String::from_utf8_lossy(&o.stdout));
    }
}

#[test]
fn json_is_byte_identical_across_runs_and_thread_counts() {
    let input = fixture("m2_checkerboard.toml");
    let args = ["run", "--suite", "all", "--input", &input, "--format", "json"];
    let a = qpbkit(&args);
    let b = qpbkit(&args);
    let c = Command::new(env!("CARGO_BIN_EXE_qpbkit")).args(args).env("QPBKIT_THREADS", "1").output().unwrap();
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["tool"], "qpbkit");
    assert_eq!(v["summary"]["failed"], 0);
}

#[test]
fn broken_bundle_fails_with_invariant_base_witness() {
    let o = qpbkit(&["run", "--suite", "bundle", "--input", &fixture("broken_trivial_coaction.toml"), "--format", "json"]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let item = v["checks"].as_array().unwrap().iter().find(|c| c["anchor"] == "bundle/invariant-base").unwrap();
    assert_eq!(item["status"], "fail");
    assert!(item["witness"].as_str().unwrap().contains("invariant subalgebra has dimension 2"));
}

#[test]
fn parse_errors_exit_two_with_location() {
    let o = qpbkit(&["run", "--suite", "hopf", "--input", &fixture("non_group_cayley.toml")]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("hopf.cayley"));
    let missing = qpbkit(&["run", "--suite", "hopf", "--input", &fixture("does_not_exist.toml")]);
    assert_eq!(code(&missing), 2);
    let bad_suite = qpbkit(&["run", "--suite", "nonsense", "--input", &fixture("m2_checkerboard.toml")]);
    assert_eq!(code(&bad_suite), 2);
    let bad_threads = Command::new(env!("CARGO_BIN_EXE_qpbkit"))
        .args(["run", "--suite", "hopf", "--input", &fixture("m2_checkerboard.toml")])
        .env("QPBKIT_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&bad_threads), 2);
}

#[test]
fn golden_file_matches_and_detects_a_scaled_frame() {
    let input = fixture("m2_checkerboard.toml");
    let golden = fixture("m2_checkerboard.golden.json");
    let ok = qpbkit(&["run", "--suite", "all", "--input", &input, "--format", "json", "--golden", &golden]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stderr));

    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&golden).unwrap()).unwrap();
    let checks = v["checks"].as_array_mut().unwrap();
    checks.reverse();
    let z = checks
        .iter_mut()
        .find(|c| c["anchor"] == "frame/right-normalization" && c["name"].as_str().unwrap().starts_with("sign:"))
        .unwrap();
    z["values"]["z"] = serde_json::Value::String("[[2, 0], [0, 2]]".into());
    let path = std::env::temp_dir().join(format!("qpbkit-golden-{}.json", std::process::id()));
    std::fs::write(&path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    let diff = qpbkit(&["run", "--suite", "all", "--input", &input, "--golden", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code(&diff), 1);
    let stderr = String::from_utf8_lossy(&diff.stderr);
    let lines: Vec<&str> = stderr.lines().filter(|l| l.starts_with("golden difference")).collect();
    assert_eq!(lines.len(), 1, "{stderr}");
    assert!(lines[0].contains(".values.z"));

    let garbage = std::env::temp_dir().join(format!("qpbkit-garbage-{}.json", std::process::id()));
    std::fs::write(&garbage, "{\"tool\": 3}").unwrap();
    let bad = qpbkit(&["run", "--suite", "hopf", "--input", &input, "--golden", garbage.to_str().unwrap()]);
    std::fs::remove_file(&garbage).ok();
    assert_eq!(code(&bad), 2);
}

#[test]
fn list_suites_names_every_suite() {
    let o = qpbkit(&["list-suites"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    for s in ["hopf", "corep", "calculus", "bundle", "assoc", "reconstruct", "all"] {
        assert!(text.lines().any(|l| l.starts_with(s)), "{s} missing");
    }
}

#[test]
fn text_report_ends_with_summary() {
    let o = qpbkit(&["run", "--suite", "hopf", "--input", &fixture("s3_group_algebra.toml")]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.trim_end().ends_with("12 checks: 12 passed, 0 failed"), "{text}");
}
