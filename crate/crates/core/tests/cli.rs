use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anyonwalk")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut r = csv::Reader::from_reader(csv.as_bytes());
    let idx = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().map(|rec| rec.unwrap()[idx].to_string()).collect()
}

#[test]
fn dist_table_sums_to_one() {
    let out = stdout(&["dist", "--t", "6", "--method", "exact"]);
    assert!(out.starts_with("t,s,x,p_anyonic,p_qw,p_rw,method,stderr\n"));
    let p: Vec<f64> = column(&out, "p_anyonic").iter().map(|v| v.parse().unwrap()).collect();
    assert_eq!(p.len(), 7);
    assert_eq!(p.iter().sum::<f64>(), 1.0);
    assert!(column(&out, "stderr").iter().all(String::is_empty));
}

#[test]
fn stub_reproduces_the_hadamard_columns() {
    let out = stdout(&["dist", "--t", "6", "--stub-trivial-bracket"]);
    assert_eq!(column(&out, "p_anyonic"), column(&out, "p_qw"));
    assert!(column(&out, "method").iter().all(|m| m == "exact-stub"));
}

#[test]
fn json_output_carries_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.json");
    let p = path.to_str().unwrap();
    stdout(&["dist", "--t", "8", "--method", "mc", "--samples", "1e4", "--seed", "5", "--output", p]);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["seed"], 5);
    assert_eq!(doc["samples"], 10000);
    assert_eq!(doc["method"], "mc-pairs");
    assert_eq!(doc["version"], env!("CARGO_PKG_VERSION"));
    assert!(doc["conventions"]["bracket"].as_str().unwrap().contains("A = exp(3i*pi/8)"));
    assert!(doc["conventions"]["fusion"].as_str().unwrap().contains("pi/8"));
    assert_eq!(doc["rows"].as_array().unwrap().len(), 9);
    assert!(doc["rows"][0]["stderr"].is_number());
}

#[test]
fn transfer_and_exact_agree() {
    let a = stdout(&["dist", "--t", "9", "--method", "transfer"]);
    let b = stdout(&["dist", "--t", "9", "--method", "exact"]);
    assert_eq!(column(&a, "p_anyonic"), column(&b, "p_anyonic"));
}

#[test]
fn worked_example_invariants() {
    let doc: Value =
        serde_json::from_str(&stdout(&["invariants", "--a", "10011", "--b", "01101"])).unwrap();
    assert_eq!(doc["proper"], true);
    assert_eq!(doc["tau"], 1);
    assert_eq!(doc["contribution_sign"], -1);
    assert_eq!(doc["z"], 2);
    let v = doc["jones_at_i"]["re"].as_f64().unwrap();
    assert!((v + 2f64.sqrt().powi(11)).abs() < 1e-9);
    assert_eq!(doc["bracket_statesum"]["exact"], doc["jones_at_i"]["exact"]);
}

#[test]
fn mirror_and_improper_pairs() {
    let doc: Value = serde_json::from_str(&stdout(&["invariants", "--a", "0110", "--b", "0110"])).unwrap();
    assert_eq!((doc["proper"].clone(), doc["tau"].clone()), (Value::Bool(true), Value::from(0)));
    assert_eq!(doc["contribution_sign"], 1);
    let doc: Value = serde_json::from_str(&stdout(&["invariants", "--a", "101", "--b", "011"])).unwrap();
    assert_eq!(doc["status"], "not proper");
    assert_eq!(doc["jones_at_i"]["exact"], "0");
    assert_eq!(doc["contribution_sign"], 0);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["dist", "--t", "15"]).status.code(), Some(3));
    assert_eq!(run(&["dist", "--t", "9", "--method", "oracle"]).status.code(), Some(3));
    assert_eq!(run(&["dist", "--t", "6", "--method", "mc", "--samples", "100"]).status.code(), Some(2));
    assert_eq!(run(&["dist", "--t", "6", "--n", "5"]).status.code(), Some(2));
    assert_eq!(run(&["dist", "--t", "6", "--output", "x.txt"]).status.code(), Some(2));
    assert_eq!(run(&["invariants", "--a", "10", "--b", "01"]).status.code(), Some(2));
    assert_eq!(run(&["dist"]).status.code(), Some(2));
    let out = run(&["dist", "--t", "15"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}

#[test]
fn variance_scan_columns() {
    let out = stdout(&["variance-scan", "--t-min", "2", "--t-max", "10"]);
    assert!(out.starts_with("t,var_anyonic,var_qw,var_rw,tv_qw,tv_rw,method\n"));
    let t = column(&out, "t");
    let var_rw = column(&out, "var_rw");
    for (t, v) in t.iter().zip(&var_rw) {
        assert_eq!(t.parse::<f64>().unwrap(), v.parse::<f64>().unwrap());
    }
}

#[test]
fn proper_density_rows() {
    let out = run(&["proper-density", "--t-min", "4", "--t-max", "9", "--seed", "3"]);
    assert!(out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("lattice self-test n=2: all=3 |P_1|=2 |P_2|=1 identities hold"));
    assert!(err.contains("t = 5: empty stratum"));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("t,s,p_prop,method,stderr,rho,bound,bound_holds\n"));
    let holds = column(&csv, "bound_holds");
    assert_eq!(holds, vec!["true", "", "true", "", "true", ""]);
}

#[test]
fn selfcheck_passes() {
    let out = stdout(&["selfcheck"]);
    assert_eq!(out.lines().count(), 7);
    assert!(out.lines().all(|l| l.contains(" pass ")));
}
