use std::process::Command;

use clap::Parser;
use serde_json::Value;
use tautrank_cli::{
    agreement, run, Cli, Route, EXIT_CAPABILITY, EXIT_ERROR, EXIT_OK, EXIT_UNSTABLE,
};

fn invoke(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["tautrank"];
    full.extend_from_slice(args);
    let o = run(&Cli::parse_from(full));
    (o.code, o.report)
}

#[test]
fn rank_pn2() {
    let (code, r) = invoke(&["rank", "--model", "pn:2", "--section", "fermat"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(r["rank"], 2);
    assert_eq!(r["stabilized"], true);
    assert_eq!(r["confirmed"], true);
    assert_eq!(r["schema"], 1);
}

#[test]
fn rank_g24_weight_zero() {
    let (code, r) = invoke(&[
        "rank",
        "--model",
        "g2n:4",
        "--section",
        "cyclic",
        "--weight-zero",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(r["rank"], 1);
}

#[test]
fn malformed_section_names_token() {
    let (code, r) = invoke(&["rank", "--model", "pn:2", "--section", "x0^3 + y7^3"]);
    assert_eq!(code, EXIT_ERROR);
    assert!(r["error"].as_str().unwrap().contains("y7"), "{r}");
}

#[test]
fn unstabilized_rank_exits_two() {
    let (code, r) = invoke(&[
        "rank",
        "--model",
        "pn:2",
        "--section",
        "fermat",
        "--dmax",
        "1",
        "--stab-window",
        "2",
    ]);
    assert_eq!(code, EXIT_UNSTABLE, "{r}");
    assert_eq!(r["rank"], Value::Null);
}

#[test]
fn capability_errors_exit_three() {
    let (code, _) = invoke(&["derham", "--model", "g2n:4", "--section", "cyclic"]);
    assert_eq!(code, EXIT_CAPABILITY);
    let (code, _) = invoke(&["rank", "--model", "pn:2", "--section", "cyclic"]);
    assert_eq!(code, EXIT_CAPABILITY);
}

#[test]
fn straighten_nu_hilbert() {
    let (_, r) = invoke(&["straighten", "--n", "4", "--graph", "1-3,2-4"]);
    assert_eq!(r["result"], "1-2,3-4 + 1-4,2-3");
    let (_, r) = invoke(&["nu", "--n", "4"]);
    assert_eq!(r["nu"], "204");
    let (_, r) = invoke(&["hilbert", "--n", "4", "--d", "2"]);
    assert_eq!(r["value"], 20);
}

#[test]
fn compare_pn2_agrees() {
    let (code, r) = invoke(&["compare", "--model", "pn:2", "--section", "fermat"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(r["agree"], true);
    let values: Vec<&Value> = r["routes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| &x["value"])
        .collect();
    assert!(values.iter().all(|v| **v == 2), "{values:?}");
}

#[test]
fn agreement_is_integer_equality() {
    let route = |name: &str, v: Option<usize>, s: bool| Route {
        route: name.into(),
        value: v,
        stabilized: s,
        skipped: None,
    };
    let (pairs, agree) = agreement(&[route("a", Some(2), true), route("b", Some(3), true)]);
    assert_eq!(pairs.len(), 1);
    assert!(!agree);
    let (pairs, agree) = agreement(&[route("a", Some(2), true), route("b", Some(2), false)]);
    assert!(pairs.is_empty());
    assert!(!agree);
    let (_, agree) = agreement(&[
        route("a", Some(2), true),
        route("b", Some(2), true),
        route("c", None, false),
    ]);
    assert!(agree);
}

#[test]
fn rank1_single_graph() {
    let (code, r) = invoke(&[
        "rank1",
        "--n",
        "4",
        "--graph",
        "1-2,2-3,3-4,1-4",
        "--verify",
    ]);
    assert_eq!(code, EXIT_OK, "{r}");
    assert_eq!(r["constant"], "-1");
    assert_eq!(r["verification"]["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn binary_writes_output_file_and_reads_section_file() {
    let dir = std::env::temp_dir().join(format!("tautrank-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let sec = dir.join("section.txt");
    std::fs::write(&sec, "x0^2 + x1^2\n").unwrap();
    let out = dir.join("report.json");
    let status = Command::new(env!("CARGO_BIN_EXE_tautrank"))
        .args(["rank", "--model", "pn:1", "--section"])
        .arg(format!("@{}", sec.display()))
        .arg("--output")
        .arg(&out)
        .env("TAUTRANK_THREADS", "2")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(EXIT_OK));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["rank"], 1);
    let back: tautrank_core::coinv::CoinvariantReport = serde_json::from_value({
        let mut r = report.clone();
        r.as_object_mut().unwrap().remove("schema");
        r
    })
    .unwrap();
    assert_eq!(back.rank, Some(1));
    std::fs::remove_dir_all(&dir).unwrap();
}
