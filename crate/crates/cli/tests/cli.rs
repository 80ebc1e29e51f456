use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hecke(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hecke"))
        .args(args)
        .env_remove("HECKE_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = hecke(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn result(args: &[&str]) -> Value {
    json(args)["result"].clone()
}

#[test]
fn single_values() {
    assert_eq!(result(&["trace", "--level", "1", "--weight", "12", "--index", "2"]), serde_json::json!({"int": -24}));
    assert_eq!(result(&["trace", "--level", "11", "--weight", "2", "--index", "1"]), serde_json::json!({"int": 1}));
    assert_eq!(
        result(&["trace", "--level", "4", "--weight", "3", "--char", "1", "--index", "7"]),
        serde_json::json!({"int": 0})
    );
    assert_eq!(result(&["classnum", "--D", "0"]), serde_json::json!({"rat": "-1/12"}));
    assert_eq!(result(&["classnum", "--D", "3"]), serde_json::json!({"rat": "1/3"}));
    assert_eq!(result(&["classnum", "--D", "-4"]), serde_json::json!({"int": -1}));
    assert_eq!(
        result(&["trace-gamma1", "--level", "7", "--weight", "4", "--index", "2", "--space", "S"]),
        serde_json::json!({"int": -3})
    );
    assert_eq!(
        result(&["trace-al", "--level", "11", "--ell", "11", "--weight", "2", "--index", "1"]),
        serde_json::json!({"int": -1})
    );
}

#[test]
fn breakdown_and_approx() {
    let v = json(&["--approx", "3", "trace", "--level", "1", "--weight", "12", "--index", "1", "--breakdown"]);
    assert_eq!(v["approx"], "1.000");
    for key in ["elliptic", "hyperbolic", "delta"] {
        assert!(v["breakdown"][key].is_object(), "{key}");
    }
    let v = json(&["--approx", "4", "classnum", "--D", "0"]);
    assert_eq!(v["result"], serde_json::json!({"rat": "-1/12"}));
    assert_eq!(v["approx"], "-0.0833");
}

#[test]
fn deterministic_without_timing() {
    let args = ["--no-timing", "trace", "--level", "13", "--weight", "4", "--char", "1", "--index", "6"];
    let a = hecke(&args);
    let b = hecke(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(!String::from_utf8_lossy(&a.stdout).contains("wall_time"));
}

#[test]
fn exit_codes() {
    assert_eq!(hecke(&["trace", "--level", "4"]).status.code(), Some(2));
    assert_eq!(hecke(&["trace", "--level", "4", "--weight", "3", "--index", "1", "--char", "x"]).status.code(), Some(2));
    assert_eq!(hecke(&["trace", "--level", "4", "--weight", "3", "--index", "1", "--char", "7"]).status.code(), Some(2));
    assert_eq!(hecke(&["trace-al", "--level", "12", "--ell", "2", "--weight", "2", "--index", "1"]).status.code(), Some(2));
    let out = hecke(&["trace", "--level", "4", "--weight", "3", "--char", "1", "--index", "1", "--mutation", "ignore-conductor"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn char_list() {
    let v = json(&["char", "list", "--level", "4"]);
    let chars = v["characters"].as_array().unwrap();
    assert_eq!(chars.len(), 2);
    assert_eq!(chars[1]["character"]["parity"], -1);
    assert_eq!(chars[1]["character"]["conductor"], 4);
}

#[test]
fn trace_form_output() {
    let v = json(&["trace-form", "--level", "1", "--weight", "12", "--precision", "10"]);
    let want: Vec<i64> = vec![1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920];
    let got: Vec<i64> = v["coefficients"].as_array().unwrap().iter().map(|c| c["int"].as_i64().unwrap()).collect();
    assert_eq!(got, want);
    let v = json(&["trace-form", "--level", "4", "--weight", "2", "--precision", "50"]);
    assert!(v["coefficients"].as_array().unwrap().iter().all(|c| c["int"] == 0));
    let v = json(&["trace-form", "--level", "4", "--weight", "6", "--precision", "8", "--parity", "even"]);
    let c = v["coefficients"].as_array().unwrap();
    assert_eq!(c[0]["int"], 0);
    assert_eq!(c[2]["int"], 0);
    let out = hecke(&["--text", "trace-form", "--level", "4", "--weight", "6", "--precision", "7", "--parity", "odd"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "1*q + -12*q^3 + 54*q^5 + -88*q^7 + O(q^8)");
}

#[test]
fn selfcheck() {
    assert!(hecke(&["selfcheck", "--bounds", "quick"]).status.success());
    let out = hecke(&["selfcheck", "--suite", "class-numbers", "--bounds", "quick", "--mutation", "flip-neg-square"]);
    assert_eq!(out.status.code(), Some(1));
    let reports: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(reports[0]["failures"][0]["case"], "Kronecker-Hurwitz: n=2");
    let out = hecke(&["selfcheck", "--suite", "2", "--bounds", "quick", "--mutation", "ignore-conductor"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(hecke(&["selfcheck", "--suite", "nope"]).status.code(), Some(2));
}

fn table(grid: &str, cache: Option<&Path>, format: &str) -> (String, String) {
    let mut args = vec!["table", "--grid", grid, "--format", format, "--jobs", "4"];
    let dir;
    match cache {
        Some(p) => {
            dir = p.to_string_lossy().to_string();
            args.extend(["--cache", &dir]);
        }
        None => args.push("--no-cache"),
    }
    let out = hecke(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    (String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

#[test]
fn table_resumes_from_cache() {
    let dir = tempfile::tempdir().unwrap();
    let grid = "N=1..10,k=2..6:2,n=1..10";
    let (first, log) = table(grid, Some(dir.path()), "csv");
    assert!(log.contains("300 computed, 0 cached"), "{log}");
    let (second, log) = table(grid, Some(dir.path()), "csv");
    assert!(log.contains("0 computed, 300 cached"), "{log}");
    assert_eq!(first, second);
    assert_eq!(first.lines().next(), Some("N,k,chi,n,value"));
    assert_eq!(first.lines().count(), 301);
}

#[test]
fn cached_values_match_fresh() {
    let dir = tempfile::tempdir().unwrap();
    let grid = "N=3..12,k=2..5,n=1..6,chi=all-valid-parity";
    let (fresh, _) = table(grid, None, "json");
    let (_, log) = table(grid, Some(dir.path()), "json");
    assert!(log.contains("0 cached"));
    let (cached, log) = table(grid, Some(dir.path()), "json");
    assert!(log.contains(" 0 computed"), "{log}");
    assert!(fresh.lines().count() >= 200);
    assert_eq!(fresh, cached);
}

#[test]
fn stale_cache_entries_are_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let grid = "N=11,k=2,n=1..3";
    let (fresh, _) = table(grid, Some(dir.path()), "csv");
    let path = dir.path().join("trace_N11_k2_chi0_n2.json");
    let mut entry: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    entry["engine_version"] = "hecke-core/0.0.0/0".into();
    entry["record"]["result"] = serde_json::json!({"int": 999});
    fs::write(&path, entry.to_string()).unwrap();
    let (again, log) = table(grid, Some(dir.path()), "csv");
    assert!(log.contains("1 computed, 2 cached"), "{log}");
    assert_eq!(fresh, again);
}

#[test]
fn csv_rejects_character_grids() {
    let out = hecke(&["table", "--grid", "N=5,k=3,n=1,chi=all-valid-parity", "--format", "csv", "--no-cache"]);
    assert_eq!(out.status.code(), Some(2));
    let out = hecke(&["table", "--grid", "N=1..3,k=2,n=1", "--format", "csv", "--kind", "gamma1", "--no-cache"]);
    assert!(out.status.success());
    assert_eq!(hecke(&["table", "--grid", "N=1..3,k=2", "--no-cache"]).status.code(), Some(2));
}
