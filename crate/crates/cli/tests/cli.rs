use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn healie(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_healie"))
        .args(args)
        .env_remove("HEALIE_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json_lines(o: &Output) -> Vec<Value> {
    stdout(o)
        .lines()
        .map(|l| serde_json::from_str(l).expect("json line"))
        .collect()
}

#[test]
fn bracket_of_hamiltonians() {
    let o = healie(&["bracket", "-c", "sl2_untwisted.json", "--json", "h[1,0]", "h[0,1]"]);
    assert_eq!(o.status.code(), Some(0));
    let v = &json_lines(&o)[0];
    assert_eq!(v["deriv"][0]["degree"], serde_json::json!([1, 1]));
    assert_eq!(v["deriv"][0]["coeff"], serde_json::json!({"rational": [-1, 1]}));
    assert_eq!(v["central"][0]["vector"], serde_json::json!([1, -1]));
    assert_eq!(v["central"][0]["degree"], serde_json::json!([1, 1]));
    assert_eq!(v["central"][0]["coeff"], serde_json::json!({"rational": [-1, 2]}));

    let o = healie(&["bracket", "-c", "sl2_untwisted.json", "h[1,0]", "h[0,1]"]);
    assert_eq!(stdout(&o).trim(), "-1/2*K[(1,-1),(1,1)] - h[1,1]");
}

#[test]
fn central_bracket_is_zero() {
    let o = healie(&["bracket", "-c", "sl2_untwisted.json", "--json", "K1", "e(1,0)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        json_lines(&o)[0],
        serde_json::json!({"central": [], "deriv": [], "loop": []})
    );
}

#[test]
fn malformed_expression_shows_caret() {
    let o = healie(&["bracket", "-c", "sl2_untwisted.json", "e(1,", "f(0,0)"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("parse error"), "{err}");
    assert!(err.contains("  e(1,\n      ^"), "{err}");
}

#[test]
fn element_outside_eigenspace_is_a_usage_error() {
    let o = healie(&["canon", "-c", "sl2_twisted", "e(0,0)"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn jacobi_suite_passes() {
    let o = healie(&[
        "check",
        "-c",
        "sl2_untwisted.json",
        "--suite",
        "jacobi",
        "-n",
        "1000",
        "--seed",
        "7",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "PASS 1000/1000");
}

#[test]
fn all_suites_pass_on_sl3_twisted() {
    let o = healie(&["check", "-c", "sl3_twisted", "--suite", "all", "-n", "100"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().last(), Some("PASS"));
}

#[test]
fn corrupted_table_fails_at_load() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(include_bytes!("../../../configs/sl2_corrupted.json"))
        .unwrap();
    let path = file.path().to_str().unwrap();
    let o = healie(&["check", "-c", path, "--suite", "jacobi"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL load-time validation"));

    let o = healie(&["check", "-c", path, "--unchecked", "--suite", "jacobi", "-n", "200"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("FAIL"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("first failure"));
}

#[test]
fn transposed_rank_one_fails_modules() {
    let o = healie(&[
        "check",
        "-c",
        "sl2_untwisted",
        "--suite",
        "modules",
        "-n",
        "50",
        "--convention",
        "row-column",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn reports_are_deterministic_and_seed_env_is_read() {
    let args = ["check", "-c", "sl2_twisted", "--suite", "form", "-n", "40", "--json"];
    let a = healie(&[&args[..], &["--seed", "11"]].concat());
    let b = healie(&[&args[..], &["--seed", "11"]].concat());
    assert_eq!(a.stdout, b.stdout);
    let c = Command::new(env!("CARGO_BIN_EXE_healie"))
        .args(args)
        .env("HEALIE_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn dims_table() {
    let o = healie(&["dims", "-c", "sl2_twisted", "--json", "0,0", "2,-3", "1,0", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = json_lines(&o);
    assert_eq!(rows[0]["central"], 2);
    assert_eq!(rows[1]["central"], 1);
    assert_eq!(rows[2]["loop"], 2);
    assert!(rows[2]["error"].is_string());
    assert!(rows[3]["error"].is_string());
}

#[test]
fn twist_reflect_act() {
    let o = healie(&[
        "twist",
        "-c",
        "sl2_untwisted",
        "--json",
        "--matrix",
        "1,1;0,1",
        "e(1,0)",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = &json_lines(&o)[0];
    assert_eq!(v["loop"][0]["degree"], serde_json::json!([1, 0]));
    assert_eq!(v["frame"], serde_json::json!([[1, 1], [0, 1]]));

    let o = healie(&["twist", "-c", "sl2_untwisted", "--matrix", "1,1;1,1", "e(1,0)"]);
    assert_eq!(o.status.code(), Some(2));

    let o = healie(&[
        "reflect",
        "-c",
        "sl2_untwisted",
        "e(1,0)",
        r#"{"h":[1],"K":[0,0],"d":[0,0]}"#,
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "h: [-1]  K: [0, 0]  d: [-1, 0]");

    let o = healie(&[
        "act",
        "-c",
        "sl2_untwisted",
        "--json",
        "--module",
        "trivial",
        "--generator",
        "h[1,0]",
        "--degree",
        "0,1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = &json_lines(&o)[0];
    // (r-bar, k) = ((0,-1),(0,1)) = -1 on the trivial module with beta = 0.
    assert_eq!(v["components"][0]["degree"], serde_json::json!([1, 1]));
    assert_eq!(
        v["components"][0]["vector"][0],
        serde_json::json!({"rational": [-1, 1]})
    );
}

#[test]
fn missing_config_is_usage_error() {
    assert_eq!(healie(&["canon", "e(1,0)"]).status.code(), Some(2));
    assert_eq!(healie(&["canon", "-c", "nope", "e(1,0)"]).status.code(), Some(2));
    assert_eq!(
        healie(&["check", "-c", "sl2_untwisted", "--suite", "nope"])
            .status
            .code(),
        Some(2)
    );
}
