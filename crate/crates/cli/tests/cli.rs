//! End-to-end tests of the `keller` binary: exit codes, determinism,
//! artifact round-trips.

use keller_cli::mapfile;
use keller_core::{certify_polynomial, corpus, InverseSeries};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn keller() -> Command {
    Command::new(env!("CARGO_BIN_EXE_keller"))
}

fn run(args: &[&str]) -> Output {
    keller().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

/// Write a corpus fixture into `dir` and return its path.
fn fixture(dir: &Path, name: &str) -> PathBuf {
    let all = corpus::corpus();
    let f = all
        .iter()
        .find(|f| f.name == name)
        .unwrap_or_else(|| panic!("no fixture named {name}"));
    let path = dir.join(format!("{name}.json"));
    mapfile::write_map(&path, &f.map).unwrap();
    path
}

#[test]
fn check_is_deterministic_and_reports_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let path = fixture(dir.path(), "shear_n2");
    let a = run(&["check", path.to_str().unwrap()]);
    let b = run(&["check", path.to_str().unwrap()]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout, "byte-identical across runs");
    let rep = stdout_json(&a);
    assert_eq!(rep["command"], "check");
    assert!(rep["input_digest"].as_str().unwrap().starts_with("sha256:"));
    assert_eq!(rep["checks"][0]["name"], "jacobian_determinant_is_one");
    assert_eq!(rep["checks"][0]["holds"], true);
}

#[test]
fn check_failing_map_exits_one_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let path = fixture(dir.path(), "nonkeller_n2");
    let out = run(&["check", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let rep = stdout_json(&out);
    assert_eq!(rep["checks"][0]["holds"], false);
    assert_eq!(rep["checks"][0]["witness"], "-2*x1");
}

#[test]
fn parse_errors_exit_two_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        "{\n  \"n\": 2,\n  \"d\": 2,\n  \"components\": [[{\"coeff\": \"1\", \"exps\": [2]}], []]\n}",
    )
    .unwrap();
    let out = run(&["check", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4"), "{err}");
    assert!(err.contains("column"), "{err}");
}

#[test]
fn reduce_linear_writes_a_linear_free_map() {
    let dir = tempfile::tempdir().unwrap();
    let path = fixture(dir.path(), "lin_n3_s0");
    let out = run(&["check", path.to_str().unwrap(), "--reduce-linear"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rep = stdout_json(&out);
    let reduced_path = PathBuf::from(rep["data"]["reduced_path"].as_str().unwrap());
    assert_eq!(reduced_path, dir.path().join("lin_n3_s0.reduced.json"));
    let (_, reduced) = mapfile::read_map(&reduced_path).unwrap();
    assert!(!reduced.has_linear_part());
}

#[test]
fn reduce_linear_rejects_non_nilpotent_linear_parts() {
    let dir = tempfile::tempdir().unwrap();
    let path = fixture(dir.path(), "linpart_bad");
    let out = run(&["check", path.to_str().unwrap(), "--reduce-linear"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not nilpotent"));
}

#[test]
fn invert_writes_the_expected_inverse_and_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let path = fixture(dir.path(), "shear_n2");
    let out = run(&["invert", path.to_str().unwrap(), "--cap", "4", "--certify"]);
    assert_eq!(code(&out), 0);
    let rep = stdout_json(&out);
    assert_eq!(rep["data"]["observed_degree"], 2);
    assert_eq!(rep["data"]["stabilized_at"], 2);
    assert_eq!(rep["data"]["degree_bounds"]["direct"], "4");
    let holds: Vec<_> = rep["checks"].as_array().unwrap().iter().map(|c| &c["holds"]).collect();
    assert!(holds.iter().all(|h| h.as_bool().unwrap()));

    // the artifact re-ingests and re-certifies against the original map
    let inverse_path = PathBuf::from(rep["data"]["output"].as_str().unwrap());
    let (text, inverse_map) = mapfile::read_map(&inverse_path).unwrap();
    assert_eq!(mapfile::to_canonical_json(&inverse_map), text, "artifact is canonical");
    let (_, original) = mapfile::read_map(&path).unwrap();
    let series = InverseSeries::from_parts(2, 4, inverse_map.components().to_vec(), 0);
    let cert = certify_polynomial(&original, &series).unwrap();
    assert!(cert.residual_norm_zero);
}

#[test]
fn invert_flags_a_non_polynomial_series() {
    let dir = tempfile::tempdir().unwrap();
    let path = fixture(dir.path(), "catalan_n1");
    let out = run(&["invert", path.to_str().unwrap(), "--cap", "4", "--certify"]);
    // residuals hold, but the degree bound is genuinely violated
    assert_eq!(code(&out), 1);
    let rep = stdout_json(&out);
    assert_eq!(rep["data"]["certificate"]["polynomial_so_far"], false);
    let bound_check = rep["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "observed_degree_within_bound")
        .unwrap();
    assert_eq!(bound_check["holds"], false);
}

#[test]
fn invert_refuses_linear_parts() {
    let dir = tempfile::tempdir().unwrap();
    let path = fixture(dir.path(), "lin_n2_s0");
    let out = run(&["invert", path.to_str().unwrap(), "--cap", "4"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn invert_with_no_cap_guards_large_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let path = fixture(dir.path(), "tri_n4_d3_s0");
    let out = run(&["invert", path.to_str().unwrap()]);
    assert_eq!(code(&out), 4);
}

#[test]
fn guard_cap_env_overrides_the_safety_cap() {
    let dir = tempfile::tempdir().unwrap();
    let path = fixture(dir.path(), "shear_n2");
    let out = keller()
        .args(["invert", path.to_str().unwrap(), "--cap", "4"])
        .env("KELLER_GUARD_CAP", "2")
        .output()
        .unwrap();
    assert_eq!(code(&out), 4);
    let out = keller()
        .args(["invert", path.to_str().unwrap(), "--cap", "4"])
        .env("KELLER_GUARD_CAP", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);
}

#[test]
fn corrupted_series_hits_the_internal_inconsistency_exit() {
    let dir = tempfile::tempdir().unwrap();
    let path = fixture(dir.path(), "shear_n2");
    let out = keller()
        .args(["invert", path.to_str().unwrap(), "--cap", "4", "--certify"])
        .env("KELLER_SELFTEST_CORRUPT", "1")
        .output()
        .unwrap();
    assert_eq!(code(&out), 5);
    assert!(String::from_utf8_lossy(&out.stderr).contains("residual"));
}

#[test]
fn trees_counts_match_the_one_variable_series() {
    let dir = tempfile::tempdir().unwrap();
    let path = fixture(dir.path(), "catalan_n1");
    let out = run(&["trees", path.to_str().unwrap(), "--order", "4"]);
    assert_eq!(code(&out), 0);
    let rep = stdout_json(&out);
    assert_eq!(rep["data"]["tree_counts_per_order"], serde_json::json!([1, 1, 2, 5]));
}

#[test]
fn trees_factorization_demands_the_hypothesis() {
    let dir = tempfile::tempdir().unwrap();
    let path = fixture(dir.path(), "catalan_n1");
    let out = run(&["trees", path.to_str().unwrap(), "--order", "4", "--factorization"]);
    assert_eq!(code(&out), 6);
}

#[test]
fn trees_factorization_holds_on_the_shear() {
    let dir = tempfile::tempdir().unwrap();
    let path = fixture(dir.path(), "shear_n2");
    let out = run(&["trees", path.to_str().unwrap(), "--order", "4", "--factorization"]);
    assert_eq!(code(&out), 0);
    let rep = stdout_json(&out);
    assert!(rep["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["holds"].as_bool().unwrap()));
}

#[test]
fn trees_guard_refuses_oversized_orders() {
    let dir = tempfile::tempdir().unwrap();
    let path = fixture(dir.path(), "shear_n2");
    let out = run(&["trees", path.to_str().unwrap(), "--order", "9"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn trace_verdicts_across_fixture_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let ok = run(&["trace", fixture(dir.path(), "chain_n3").to_str().unwrap(), "--cap", "8"]);
    assert_eq!(code(&ok), 0);

    let failing = run(&["trace", fixture(dir.path(), "nonkeller_n2").to_str().unwrap(), "--cap", "4"]);
    assert_eq!(code(&failing), 1);
    let rep = stdout_json(&failing);
    let vanishing = rep["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "trace_log_vanishes_product_is_one")
        .unwrap();
    assert_eq!(vanishing["witness"], "2*x1");

    let reduced = run(&["trace", fixture(dir.path(), "lin_n2_s0").to_str().unwrap(), "--cap", "6"]);
    assert_eq!(code(&reduced), 0);
    assert_eq!(stdout_json(&reduced)["data"]["reduced_from_linear"], true);

    let rejected = run(&["trace", fixture(dir.path(), "linpart_bad").to_str().unwrap()]);
    assert_eq!(code(&rejected), 3);
}

#[test]
fn timings_go_to_stderr_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = fixture(dir.path(), "shear_n2");
    let plain = run(&["check", path.to_str().unwrap()]);
    let timed = run(&["check", path.to_str().unwrap(), "--timings"]);
    assert_eq!(plain.stdout, timed.stdout, "stdout unaffected by --timings");
    assert!(String::from_utf8_lossy(&timed.stderr).contains("total_ms"));
}

#[test]
fn corpus_generator_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("corpus");
    let gen = |label: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_gen-corpus"))
            .arg(&target)
            .output()
            .expect("generator runs");
        assert!(out.status.success(), "{label}: {}", String::from_utf8_lossy(&out.stderr));
    };
    gen("first");
    let manifest = std::fs::read(target.join("manifest.json")).unwrap();
    let sample = std::fs::read(target.join("tri_n3_d2_s0.json")).unwrap();
    gen("second");
    assert_eq!(std::fs::read(target.join("manifest.json")).unwrap(), manifest);
    assert_eq!(std::fs::read(target.join("tri_n3_d2_s0.json")).unwrap(), sample);
    assert!(target.join("bad/exps_length.json").exists());
    let entries: serde_json::Value = serde_json::from_slice(&manifest).unwrap();
    assert_eq!(entries.as_array().unwrap().len(), corpus::corpus().len());
}
