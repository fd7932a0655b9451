use std::process::{Command, Output};

use serde_json::Value;

fn mkr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mkr")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.push("--json");
    let o = mkr(&all);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

#[test]
fn flats_of_u23() {
    let o = mkr(&["flats", "--family", "uniform", "--r", "2", "--n", "3"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("rank 1: [0] [1] [2]"));
    assert!(out.contains("5 flats"));
    let v = json(&["flats", "--family", "uniform", "--r", "2", "--n", "3"]);
    assert_eq!(v["count"], 5);
}

#[test]
fn euler_of_eta_e() {
    let o = mkr(&["euler", "--family", "uniform", "--r", "2", "--n", "3", "--eta", r#"{"E":1}"#]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "1");
    // η_{0} is zero in the plain ring, so χ vanishes.
    let v = json(&["euler", "--family", "uniform", "--r", "2", "--n", "3", "--eta", r#"{"0":1}"#]);
    assert_eq!(v["chi"], 0);
}

#[test]
fn fy_snapper_verifies_on_k4() {
    let o = mkr(&["snapper", "--fy", "--family", "graphic-k4", "--verify"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("all coefficients match ring oracle"));
}

#[test]
fn simplicial_snapper_verifies_both_flavors() {
    for flavor in ["plain", "aug"] {
        let v = json(&["snapper", "--family", "boolean", "--n", "3", "--flavor", flavor, "--verify"]);
        assert_eq!(v["basis"], "rising");
        assert_eq!(v["verified"], true);
    }
}

#[test]
fn charpoly_of_k4() {
    let v = json(&["charpoly", "--family", "graphic", "--edges", "0-1,0-2,0-3,1-2,1-3,2-3"]);
    assert_eq!(v["reduced"], serde_json::json!([1, -5, 6]));
}

#[test]
fn ring_info_ranks() {
    let v = json(&["ring-info", "--family", "uniform", "--r", "2", "--n", "3", "--flavor", "aug"]);
    assert_eq!(v["chow_rank"], 6);
    assert_eq!(v["k_rank"], 6);
    assert_eq!(v["chow_graded_ranks"], serde_json::json!([1, 4, 1]));
}

#[test]
fn degree_of_h_e_power() {
    let v = json(&["degree", "--family", "uniform", "--r", "3", "--n", "4", "--h", r#"{"E":2}"#]);
    assert_eq!(v["degree"], 1);
    let o = mkr(&["degree", "--family", "uniform", "--r", "3", "--n", "4", "--h", r#"{"E":1}"#]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn serre_reports_both_identities() {
    let v = json(&["serre", "--family", "uniform", "--r", "2", "--n", "3", "--flavor", "aug"]);
    assert_eq!(v["with_omega"], v["basis_size"]);
    let plain = json(&["serre", "--family", "fano"]);
    assert_eq!(plain["with_omega"], plain["basis_size"]);
}

#[test]
fn zeta_exports_matrix() {
    let v = json(&["zeta", "--family", "uniform", "--r", "2", "--n", "3"]);
    let n = v["k_basis"].as_array().unwrap().len();
    assert_eq!(v["matrix"].as_array().unwrap().len(), n);
}

#[test]
fn m0n_commands() {
    let o = mkr(&["m0n", "--n", "4", "--psi", "1,2,-1,0"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "3");
    let v = json(&["m0n", "--n", "5"]);
    assert_eq!(v["presentation_passed"], true);
    assert_eq!(v["quotient_graded_ranks"], serde_json::json!([1, 5, 1]));
    let v = json(&["m0n", "--n", "5", "--index", r#"{"0,1,2":1}"#]);
    assert_eq!(v["coefficient"], v["chi"]);
    assert_eq!(mkr(&["m0n", "--n", "9"]).status.code(), Some(1));
}

#[test]
fn matroid_file_input() {
    let path = std::env::temp_dir().join(format!("mkr-cli-test-{}.json", std::process::id()));
    std::fs::write(&path, r#"{"n": 3, "bases": [[0, 1], [0, 2], [1, 2]]}"#).unwrap();
    let v = json(&["flats", "--matroid-file", path.to_str().unwrap()]);
    assert_eq!(v["count"], 5);
    std::fs::write(&path, r#"{"n": 3, "bases": [[0, 1], [2]]}"#).unwrap();
    let o = mkr(&["flats", "--matroid-file", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::remove_file(&path).ok();
}

#[test]
fn exit_codes_and_guards() {
    assert_eq!(mkr(&["flats", "--family", "torus"]).status.code(), Some(2));
    assert_eq!(mkr(&["flats"]).status.code(), Some(2));
    assert_eq!(mkr(&["frobnicate"]).status.code(), Some(2));
    let big = mkr(&["flats", "--family", "uniform", "--r", "2", "--n", "9"]);
    assert_eq!(big.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&big.stderr).contains("combinatorial explosion"));
    assert!(mkr(&["flats", "--family", "uniform", "--r", "2", "--n", "9", "--force"]).status.success());
    let aug = json_err(&["ring-info", "--family", "boolean", "--n", "6", "--flavor", "aug"]);
    assert_eq!(aug["error"]["kind"], "combinatorial_explosion");
}

fn json_err(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.push("--json");
    let o = mkr(&all);
    assert!(!o.status.success());
    serde_json::from_str(&stdout(&o)).unwrap()
}

#[test]
fn selftest_single_criterion_is_deterministic() {
    let a = mkr(&["selftest", "--criterion", "10"]);
    let b = Command::new(env!("CARGO_BIN_EXE_mkr"))
        .args(["selftest", "--criterion", "10"])
        .env("MKR_THREADS", "1")
        .output()
        .unwrap();
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).starts_with("PASS criterion 10"));
}
