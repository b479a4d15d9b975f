use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn toricx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toricx")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("toricx-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn variety_info_xd3() {
    let out = toricx(&["variety", "info", "Xd:3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["rays"], 8);
    assert_eq!(v["max_cones"], 12);
    assert_eq!(v["picard_rank"], 5);
    assert_eq!(v["fano"], true);
    assert_eq!(v["euler_characteristic"], 12);
}

#[test]
fn frobenius_split_xd3() {
    let out = toricx(&["frobenius", "split", "--variety", "Xd:3", "--p", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let classes = v["classes"].as_array().unwrap();
    assert_eq!(classes.len(), 12);
    let total: u64 = classes.iter().map(|c| c["multiplicity"].as_u64().unwrap()).sum();
    assert_eq!(total, 125);
    let reps: Vec<Vec<i64>> = classes
        .iter()
        .map(|c| serde_json::from_value(c["representative"].clone()).unwrap())
        .collect();
    let mut sorted = reps.clone();
    sorted.sort();
    assert_eq!(reps, sorted);
}

#[test]
fn frobenius_default_p_is_five() {
    let a = toricx(&["frobenius", "split", "--variety", "P:1"]);
    let b = toricx(&["frobenius", "split", "--variety", "P:1", "--p", "5"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["p"], 5);
}

#[test]
fn small_p_warns_on_stderr() {
    let out = toricx(&["frobenius", "verify", "--variety", "Xd:3", "--p", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    assert_eq!(json(&out)["classes"], 11);
    assert_eq!(json(&out)["stable_at_p_plus_2"], false);
}

#[test]
fn bondal_f2_fails() {
    let out = toricx(&["bondal", "check", "--variety", "F2"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["pass"], false);
    assert_eq!(v["violations"][0]["coeffs"][0], -2);
    let ok = toricx(&["bondal", "check", "--variety", "Xd:3"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["walls"], 18);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["bondal", "check"][..],
        &["variety", "info", "Q:1"],
        &["frobenius", "split", "--variety", "P:1", "--p", "x"],
        &["frobenius", "split", "--variety", "P:1", "--bogus"],
        &["frobenius", "split", "--variety", "P:1", "--base-cone", "9"],
        &["frobenius", "split", "--variety", "P:1", "--fan", "nowhere.json"],
        &["cohomology", "compute", "--variety", "P:1", "--divisor", "nowhere.json"],
        &["--threads", "0", "variety", "info", "P:1"],
    ] {
        let out = toricx(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn fan_file_agrees_with_descriptor() {
    for spec in ["P:2", "dP:3", "Xd:3", "P:1*P:1"] {
        let export = toricx(&["variety", "export", spec]);
        assert_eq!(export.status.code(), Some(0));
        let path = scratch(&format!("{}.json", spec.replace([':', '*'], "_")), &String::from_utf8(export.stdout).unwrap());
        let path = path.to_str().unwrap();
        for cmd in [
            &["frobenius", "split"][..],
            &["frobenius", "verify"],
            &["bondal", "check"],
            &["collection", "order", "--frobenius"],
        ] {
            let mut a: Vec<&str> = cmd.to_vec();
            a.extend(["--variety", spec]);
            let mut b: Vec<&str> = cmd.to_vec();
            b.extend(["--fan", path]);
            let (x, y) = (toricx(&a), toricx(&b));
            assert_eq!(x.status.code(), y.status.code(), "{spec} {cmd:?}");
            assert_eq!(x.stdout, y.stdout, "{spec} {cmd:?}");
        }
        let info_a = json(&toricx(&["variety", "info", spec]));
        let info_b = json(&toricx(&["variety", "info", "--fan", path]));
        for key in ["rays", "max_cones", "picard_rank", "fano", "euler_characteristic", "poincare"] {
            assert_eq!(info_a[key], info_b[key], "{spec} {key}");
        }
    }
}

#[test]
fn invalid_fan_file_is_rejected() {
    let half = scratch("half.json", r#"{"dim":2,"rays":[[1,0],[0,1],[-1,0]],"max_cones":[[0,1],[1,2]]}"#);
    let out = toricx(&["bondal", "check", "--fan", half.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let info = toricx(&["variety", "info", "--fan", half.to_str().unwrap()]);
    assert_eq!(info.status.code(), Some(2));
}

#[test]
fn repeated_runs_are_byte_identical() {
    for args in [
        &["frobenius", "split", "--variety", "Xd:3", "--p", "5"][..],
        &["bondal", "check", "--variety", "Xd:5"],
        &["collection", "order", "--variety", "dP:3", "--frobenius"],
        &["--threads", "3", "frobenius", "split", "--variety", "P:1*dP:3", "--p", "3"],
    ] {
        let a = toricx(args);
        let b = toricx(args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn cohomology_compute() {
    let d = scratch("k_p2.json", r#"{"coeffs":[-1,-1,-1]}"#);
    let out = toricx(&["cohomology", "compute", "--variety", "P:2", "--divisor", d.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["dims"], serde_json::json!([0, 0, 1]));
    assert!(v["box"].as_i64().unwrap() >= 2);
    let fixed = toricx(&[
        "cohomology", "compute", "--variety", "P:2", "--divisor", d.to_str().unwrap(), "--box", "5", "--degrees",
    ]);
    let v = json(&fixed);
    assert_eq!(v["box"], 5);
    assert_eq!(v["contributions"].as_array().unwrap().len(), 1);
    let wrong = scratch("short.json", r#"{"coeffs":[1]}"#);
    let out = toricx(&["cohomology", "compute", "--variety", "P:2", "--divisor", wrong.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn collections() {
    let good = scratch("p1_good.json", r#"{"bundles":[[0,0],[1,0]]}"#);
    let bad = scratch("p1_bad.json", r#"{"bundles":[[1,0],[0,0]]}"#);
    let blocked = scratch("p1_blocked.json", r#"{"bundles":[[0,0],[2,0]]}"#);
    let g = good.to_str().unwrap();
    let out = toricx(&["collection", "verify", "--variety", "P:1", "--collection", g]);
    assert_eq!(out.status.code(), Some(0));
    let out = toricx(&["collection", "verify", "--variety", "P:1", "--collection", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["violations"][0]["kind"], "backward");
    let out = toricx(&["collection", "order", "--variety", "P:1", "--collection", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["bundles"], serde_json::json!([[0, 0], [1, 0]]));
    let out = toricx(&["collection", "order", "--variety", "P:1", "--collection", blocked.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["blocked_pair"], serde_json::json!([0, 1]));

    let out = toricx(&[
        "collection", "product", "--variety", "P:1", "--collection", g, "--second-variety", "dP:3", "--second-frobenius",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["bundles"].as_array().unwrap().len(), 12);
    let out = toricx(&[
        "collection", "product", "--variety", "P:1", "--collection", bad.to_str().unwrap(), "--second-variety", "P:1",
        "--second-collection", g,
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn table_format() {
    let out = toricx(&["--format", "table", "variety", "info", "Xd:3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("max cones    12"));
    let out = toricx(&["bondal", "check", "--variety", "F2", "--format", "table"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("coeffs (-2)"));
}
