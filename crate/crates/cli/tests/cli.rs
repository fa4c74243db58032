use std::process::{Command, Output};

use serde_json::Value;

fn latval(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latval")).args(args).output().expect("binary runs")
}

fn json_ok(args: &[&str]) -> Value {
    let out = latval(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

const UNIT: &str = r#"[{"lo":"0","hi":"1","lo_closed":true,"hi_closed":true}]"#;
const OPEN_UNIT: &str = r#"[{"lo":"0","hi":"1","lo_closed":false,"hi_closed":false}]"#;

#[test]
fn measure_and_integrate() {
    let v = json_ok(&["measure", "--set", r#"[{"lo":"1/3","hi":"2","lo_closed":false,"hi_closed":true}]"#]);
    assert_eq!(v["value"], "5/3");
    let step = r#"{"breakpoints":["0","1","2"],"open_values":["2","3"],"point_values":["0","0","0"]}"#;
    assert_eq!(json_ok(&["integrate", "--step", step])["value"], "5");
}

#[test]
fn distance_and_approx_eq() {
    let v = json_ok(&["approx-eq", "--a", UNIT, "--b", OPEN_UNIT]);
    assert_eq!(v["approx_equal"], true);
    assert_eq!(v["distance"], "0");
    let half = r#"[{"lo":"0","hi":"1/2","lo_closed":true,"hi_closed":true}]"#;
    assert_eq!(json_ok(&["distance", "--a", UNIT, "--b", half])["distance"], "1/2");
    let step = r#"{"breakpoints":["0","1"],"open_values":["1"],"point_values":["0","0"]}"#;
    assert_eq!(latval(&["distance", "--a", UNIT, "--b", step]).status.code(), Some(2));
}

#[test]
fn inputs_from_files_and_out() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("set.json");
    let output = dir.path().join("out.json");
    std::fs::write(&input, UNIT).unwrap();
    let out = latval(&["measure", "--set", input.to_str().unwrap(), "--out", output.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&output).unwrap()).unwrap();
    assert_eq!(v["value"], "1");
}

#[test]
fn input_errors_exit_2_with_path() {
    let out = latval(&["measure", "--set", r#"[{"lo":"0","hi":"oops","lo_closed":true,"hi_closed":true}]"#]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("[0].hi"));
    assert_eq!(latval(&["measure", "--set", "/nonexistent/file.json"]).status.code(), Some(2));
    assert_eq!(latval(&["check", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(latval(&["measure", "--set", UNIT, "--format", "csv"]).status.code(), Some(2));
}

#[test]
fn quotient_collapses_null_classes() {
    let doc = r#"{"carrier":["0","a","b","1"],"leq":[["0","a"],["0","b"],["a","1"],["b","1"]],
        "values":{"0":"0","a":"0","b":"1","1":"1"}}"#;
    let v = json_ok(&["quotient", "--lattice", doc]);
    assert_eq!(v["classes"].as_array().unwrap().len(), 2);
    assert_eq!(v["hausdorff"], true);
    let bad = r#"{"carrier":["0","a","b","1"],"leq":[["0","a"],["0","b"],["a","1"],["b","1"]],
        "values":{"0":"0","a":"1","b":"1","1":"5"}}"#;
    assert_eq!(latval(&["quotient", "--lattice", bad]).status.code(), Some(1));
}

#[test]
fn converge_trace_csv() {
    let out = latval(&["converge-trace", "--seq", r#"{"kind":"interval","template":"[0, 1 + 1/n]"}"#, "--depth", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text,
        "stage,phi,phi_running_meet,phi_running_join\n1,2,2,2\n2,3/2,3/2,2\n3,4/3,4/3,2\n"
    );
}

#[test]
fn sqrt2_witness_small() {
    let v = json_ok(&["sqrt2-witness", "--depth", "12"]);
    assert_eq!(v["scan"]["rational_root_found"], false);
    assert_eq!(v["stages"].as_array().unwrap().len(), 12);
}

#[test]
fn dense_approx_runs() {
    let seq = r#"{"kind":"interval","template":"[0, 1 + 1/n]","modulus":"ceil(1/eps)"}"#;
    let v = json_ok(&["dense-approx", "--seq", seq, "--eps-index", "3", "--depth", "10"]);
    assert_eq!(v["stages"].as_array().unwrap().len(), 10);
    let missing = r#"{"kind":"interval","template":"[0, 1 + 1/n]"}"#;
    assert_eq!(latval(&["dense-approx", "--seq", missing, "--eps-index", "3"]).status.code(), Some(2));
}

#[test]
fn fubini_rectangle() {
    let terms = r#"[{"coefficient":"2","base_x":[{"lo":"0","hi":"3","lo_closed":true,"hi_closed":true}],
        "base_y":[{"lo":"1","hi":"2","lo_closed":true,"hi_closed":true}]}]"#;
    let v = json_ok(&["fubini-check", "--terms", terms]);
    assert_eq!(v["lhs"], "6");
    assert_eq!(v["rhs"], "6");
    assert_eq!(v["equal"], true);
}

#[test]
fn stump_alpha_and_borel() {
    let v = json_ok(&["stump-alpha", "--tree", r#"{"node":[{"leaf":true},{"node":[{"leaf":true}]}]}"#]);
    assert_eq!(v["alpha"], 2);
    let all = json_ok(&["borel-decode", "--code", "7", "--space", "2x2"]);
    assert_eq!(all["points"].as_array().unwrap().len(), 4);
    let one = json_ok(&["borel-decode", "--code", "7", "--space", "2x2", "--point", "1,2"]);
    let member = all["points"].as_array().unwrap().iter().find(|p| p["point"] == serde_json::json!([1, 2])).unwrap();
    assert_eq!(one["member"], member["member"]);
    assert_eq!(latval(&["borel-decode", "--code", "0", "--space", "2x2"]).status.code(), Some(2));
    assert_eq!(latval(&["borel-decode", "--code", "7", "--space", "2x2", "--point", "3,1"]).status.code(), Some(2));
}

#[test]
fn totient_table_and_check() {
    let v = json_ok(&["totient-table", "--max", "10"]);
    assert_eq!(v["rows"][8]["totient"], 6);
    let v = json_ok(&["check", "--suite", "negative-controls", "--samples", "20"]);
    assert!(v.as_object().unwrap().values().all(|p| p["fail"] == 0));
}

#[test]
fn output_is_deterministic() {
    let a = latval(&["check", "--suite", "modularity", "--samples", "30", "--seed", "7"]);
    let b = latval(&["check", "--suite", "modularity", "--samples", "30", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
}
