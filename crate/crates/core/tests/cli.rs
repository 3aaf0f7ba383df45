// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::Command;

use basespace::cli::{run, Outcome};

fn example(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../docs/examples")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn cli(args: &[&str]) -> Outcome {
    let mut argv = vec!["basespace".to_string()];
    argv.extend(args.iter().map(|a| {
        if a.ends_with(".json") && !a.starts_with('/') {
            example(a)
        } else {
            a.to_string()
        }
    }));
    run(argv)
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut with = vec!["--json"];
    with.extend_from_slice(args);
    serde_json::from_str(&cli(&with).text).expect("json report")
}

#[test]
fn validate_examples() {
    for doc in [
        "sierpinski.json",
        "all3.json",
        "lebesgue.json",
        "reals.json",
        "functions.json",
        "uniform.json",
        "finite-measure.json",
        "dyadic-indicator.json",
    ] {
        let out = cli(&["validate", doc]);
        assert_eq!(out.code(), 0, "{doc}: {}", out.text);
    }
}

#[test]
fn classify_sierpinski_fails_with_witness() {
    let out = cli(&["classify", "sierpinski.json"]);
    assert_eq!(out.code(), 1);
    assert!(
        out.text.contains("lsb: fails, witness u = (closed)^ω, v = (open)^ω"),
        "{}",
        out.text
    );
    let report = json(&["classify", "sierpinski.json"]);
    assert_eq!(report["exit_code"], 1);
    assert_eq!(report["command"], "classify");
}

#[test]
fn approach_and_limits() {
    assert_eq!(
        cli(&["approach", "sierpinski.json", "--from", "at-open", "--to", "at-closed"]).code(),
        0
    );
    assert_eq!(
        cli(&["approach", "sierpinski.json", "--from", "at-closed", "--to", "at-open"]).code(),
        1
    );
    let out = cli(&["limits", "sierpinski.json", "--net", "alternating"]);
    assert_eq!(out.code(), 0);
    assert!(out.text.ends_with("{closed}\n"), "{}", out.text);
}

#[test]
fn suite_over_three_point_topologies_reports_marginal_failures() {
    let report = json(&["suite", "--max-cycle", "2", "all3.json"]);
    assert_eq!(report["exit_code"], 1);
    let text = report.to_string();
    assert!(text.contains("marginal-convergence"));
    let out = cli(&["suite", "--max-cycle", "2", "all3.json"]);
    for line in out.text.lines().filter(|l| l.trim_start().starts_with("transitivity:")) {
        assert!(line.ends_with(" 0 counterexamples"), "{line}");
    }
}

#[test]
fn integrate_lebesgue_within_bound() {
    let report = json(&["integrate", "lebesgue.json", "--depth", "16"]);
    assert_eq!(report["exit_code"], 0);
    let value = report["value"][0].as_f64().unwrap();
    assert!((value - 0.5).abs() <= 2f64.powi(-16));
    assert_eq!(report["bound"].as_f64(), Some(1.52587890625e-05));
    assert_eq!(report["value_exact"][0], "65535/131072");
}

#[test]
fn integrate_finite_and_divergent() {
    let out = cli(&["integrate", "finite-measure.json"]);
    assert_eq!(out.code(), 0);
    assert!(out.text.starts_with("∫ weights d(counts) = 4"), "{}", out.text);
    let out = cli(&["integrate", "dyadic-indicator.json"]);
    assert_eq!(out.code(), 1);
    assert!(out.text.contains("diverges"));
}

#[test]
fn completion_levels() {
    let unknown = cli(&[
        "complete",
        "eq",
        "reals.json",
        "--left",
        "sqrt2-decimal",
        "--right",
        "sqrt2-1.414",
        "--level",
        "12",
    ]);
    assert_eq!(unknown.code(), 3, "{}", unknown.text);
    let apart = cli(&[
        "complete",
        "eq",
        "reals.json",
        "--left",
        "sqrt2-decimal",
        "--right",
        "sqrt2-1.414",
        "--level",
        "13",
    ]);
    assert_eq!(apart.code(), 1, "{}", apart.text);
    let equal = cli(&[
        "complete",
        "eq",
        "reals.json",
        "--left",
        "sqrt2-decimal",
        "--right",
        "sqrt2-fraction",
        "--level",
        "20",
    ]);
    assert_eq!(equal.code(), 0, "{}", equal.text);
}

#[test]
fn broken_modulus_is_a_failure() {
    let out = cli(&["cauchy", "reals.json", "--sequence", "bad-modulus"]);
    assert_eq!(out.code(), 1, "{}", out.text);
}

#[test]
fn power_net_not_uniformly_convergent() {
    let out = cli(&["funcspace", "uc-check", "functions.json", "--net", "powers"]);
    assert_eq!(out.code(), 1, "{}", out.text);
    assert!(out.text.contains("0.965936"));
}

#[test]
fn input_errors_exit_four() {
    assert_eq!(cli(&["validate", "/nonexistent/doc.json"]).code(), 4);
    assert_eq!(cli(&["frobnicate"]).code(), 4);
    assert_eq!(cli(&["limits", "sierpinski.json", "--net", "missing"]).code(), 4);
    assert_eq!(cli(&["--help"]).code(), 0);
}

#[test]
fn malformed_documents() {
    let dir = std::env::temp_dir().join(format!("basespace-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("dangling.json");
    std::fs::write(
        &bad,
        r#"{"version": 1,
            "spaces": [{"name": "s", "points": ["a"], "opens": [[], ["a"]]}],
            "bases": [{"name": "b", "space": "s", "levels": {"e0": [7]}}]}"#,
    )
    .unwrap();
    // `validate` lists the problems as its witness; loading for any other
    // command is an input error.
    let out = cli(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.code(), 1);
    assert!(out.text.contains("level `e0`: open index 7 out of range"), "{}", out.text);
    assert_eq!(cli(&["classify", bad.to_str().unwrap()]).code(), 4);
    let syntax = dir.join("syntax.json");
    std::fs::write(&syntax, "{\"version\": 1,\n  \"spaces\": [}").unwrap();
    let out = cli(&["validate", syntax.to_str().unwrap()]);
    assert_eq!(out.code(), 4);
    assert!(out.text.contains("line 2"), "{}", out.text);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn json_reports_are_deterministic() {
    for args in [
        vec!["--json", "--seed", "3", "classify", "sierpinski.json"],
        vec!["--json", "--seed", "3", "integrate", "dyadic-indicator.json", "--depth", "8"],
        vec!["--json", "--seed", "3", "uspace", "uniform.json", "--uniformity", "coarse"],
    ] {
        assert_eq!(cli(&args).text, cli(&args).text, "{args:?}");
    }
}

#[test]
fn binary_exit_codes_match_library() {
    let out = Command::new(env!("CARGO_BIN_EXE_basespace"))
        .args(["classify", &example("sierpinski.json")])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("lsb: fails"));
}
