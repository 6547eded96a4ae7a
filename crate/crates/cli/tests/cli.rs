//! End-to-end runs of the `btop` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use btop_core::io::read_operator_binary;
use serde_json::Value;

const CASE2: &str = r#"{"n":2,"coeffs":[{"k":1,"re":[[1,0],[0,1]]},{"k":-1,"re":[[1,0],[0,0]]}]}"#;
const CASE2_Q: &str = r#"{"v":{"re":[[1,0],[0,1]]},"factors":[
    {"alpha":{"re":0},"P":{"re":[[0,0],[0,1]]}},{"alpha":{"re":0},"P":{"re":[[0,0],[0,1]]}}]}"#;

fn write(name: &str, text: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn btop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_btop")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn analyze_case2_reports_subnormal_evidence() {
    let (s, q) = (write("case2.json", CASE2), write("case2_q.json", CASE2_Q));
    let out = btop(&["analyze", s.to_str().unwrap(), "--potapov", q.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["report"]["verdict"], "subnormal-evidence");
    assert_eq!(v["report"]["commutator_rank"], 1);
    assert_eq!(v["config"]["n_trunc"], 64);
}

#[test]
fn analyze_csv_uses_the_json_verdict_names() {
    let s = write("case2_csv.json", CASE2);
    let out = btop(&["analyze", s.to_str().unwrap(), "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("field,value\n"));
    assert!(text.contains("\nverdict,subnormal-evidence\n"), "{text}");
}

#[test]
fn constant_unitary_is_normal() {
    let s = write("unitary.json", r#"{"n":2,"coeffs":[{"k":0,"re":[[0,1],[1,0]]}]}"#);
    let v = json(&btop(&["analyze", s.to_str().unwrap()]));
    assert_eq!(v["report"]["verdict"], "normal");
}

#[test]
fn scalar_with_large_conjugate_part_is_not_hyponormal() {
    let s = write("czbar2.json", r#"{"n":1,"coeffs":[{"k":1,"re":[[1]]},{"k":-1,"re":[[2]]}]}"#);
    let v = json(&btop(&["analyze", s.to_str().unwrap()]));
    assert_eq!(v["report"]["verdict"], "not-hyponormal");
    assert_eq!(v["report"]["hyponormal"], false);
}

#[test]
fn malformed_symbol_exits_2() {
    let s = write("bad.json", r#"{"n":2,"coeffs":[{"k":0,"re":[[1]]}]}"#);
    assert_eq!(code(&btop(&["analyze", s.to_str().unwrap()])), 2);
    assert_eq!(code(&btop(&["analyze", "/nonexistent/symbol.json"])), 2);
}

#[test]
fn potapov_violating_the_equation_exits_3() {
    let s = write("eq_fail.json", r#"{"n":1,"coeffs":[{"k":1,"re":[[1]]},{"k":-1,"re":[[0.5]]}]}"#);
    let q = write("eq_fail_q.json", r#"{"v":{"re":[[1]]},"factors":[{"alpha":{"re":0},"P":{"re":[[1]]}}]}"#);
    let out = btop(&["analyze", s.to_str().unwrap(), "--potapov", q.to_str().unwrap()]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn unknown_lemma_and_catalog_id_exit_2() {
    assert_eq!(code(&btop(&["verify", "9.9", "random:1,2"])), 2);
    assert_eq!(code(&btop(&["verify", "3.3", "nowhere:1"])), 2);
    assert_eq!(code(&btop(&["catalog", "case7"])), 2);
}

#[test]
fn verification_failure_exits_1() {
    let out = btop(&["verify", "3.2", "random:3,5", "--tol-angle", "1e-300"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("failed"));
    assert_eq!(json(&out)["all_pass"], false);
}

#[test]
fn finite_rank_bound_on_fifty_instances() {
    let out = btop(&["verify", "3.3", "random:7,50"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 50);
    assert!(rows.iter().all(|r| r["pass"] == true));
}

#[test]
fn verify_csv_has_one_row_per_instance() {
    let out = btop(&["--format", "csv", "verify", "1.1", "random:4,6"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("instance,measure,value,dim_a,dim_b,pass"));
    assert_eq!(lines.count(), 6);
}

#[test]
fn catalog_entry_emits_hankel_witness() {
    let v = json(&btop(&["catalog", "remark3.4"]));
    let entry = &v["entries"][0];
    assert_eq!(entry["id"], "remark3.4");
    assert_eq!(entry["all_match"], true);
    let witness = entry["checks"].as_array().unwrap().iter().find(|c| c["name"] == "witness-hankel-bar").unwrap();
    assert_eq!(witness["pass"], true);
}

#[test]
fn scalar_entry_at_one_half() {
    let v = json(&btop(&["catalog", "scalar-czbar", "--c", "0.5"]));
    let entry = &v["entries"][0];
    assert_eq!(entry["report"]["hyponormal"], true);
    assert_ne!(entry["report"]["verdict"], "normal");
    let zeros = entry["q_zeros"].as_array().unwrap();
    assert_eq!(zeros.len(), 2);
    for z in zeros {
        assert!(z["re"].as_f64().unwrap().abs() < 1e-12);
        assert!((z["im"].as_f64().unwrap().abs() - 0.5f64.sqrt()).abs() < 1e-12);
    }
}

#[test]
fn config_file_is_overridden_by_flags_and_echoed() {
    let cfg = write("config.json", r#"{"n_trunc": 32, "k_max": 2, "seed": 9}"#);
    let v = json(&btop(&["--config", cfg.to_str().unwrap(), "--kmax", "3", "catalog", "case2"]));
    assert_eq!(v["config"]["n_trunc"], 32);
    assert_eq!(v["config"]["k_max"], 3);
    assert_eq!(v["config"]["seed"], 9);
    let bad = write("config_bad.json", r#"{"n_trunk": 32}"#);
    assert_eq!(code(&btop(&["--config", bad.to_str().unwrap(), "catalog", "case2"])), 2);
}

#[test]
fn gen_is_deterministic_per_seed() {
    let a = btop(&["--seed", "3", "gen", "--count", "4"]);
    let b = btop(&["--seed", "3", "gen", "--count", "4"]);
    let c = btop(&["--seed", "4", "gen", "--count", "4"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn dump_round_trips() {
    let s = write("dump.json", CASE2);
    let csv = btop(&["--n-trunc", "3", "dump", s.to_str().unwrap()]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 36);
    assert!(text.contains("\n2,0,1e0,0e0\n"), "{text}");

    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("dump.bin");
    let out = btop(&["--n-trunc", "3", "--out", path.to_str().unwrap(), "dump", s.to_str().unwrap(), "--encoding", "bin"]);
    assert_eq!(code(&out), 0);
    let op = read_operator_binary(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!((op.n(), op.blocks()), (2, 3));
    let m = op.matrix();
    // Block (1, 0) is the z coefficient, block (0, 1) the conj z one.
    assert_eq!(m[(2, 0)].re, 1.0);
    assert_eq!(m[(3, 1)].re, 1.0);
    assert_eq!(m[(0, 2)].re, 1.0);
    assert_eq!(m[(1, 3)].re, 0.0);
}

#[test]
fn thread_count_does_not_change_output() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_btop"))
            .env("BTOP_THREADS", threads)
            .args(["verify", "3.1", "random:2,12"])
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("4"));
}
