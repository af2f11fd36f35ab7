//! Drives the compiled binary end to end: exit status 0 iff every check in
//! the invoked suite passed, 2 on operational errors, diagnostics on stderr.

use std::process::Command;

fn qweyl(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qweyl"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn passing_suite_exits_zero_with_json_array() {
    let out = qweyl(&["suite", "--name", "structure", "--family", "C", "--n", "5", "--json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let reports = v.as_array().unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0]["suite"], "structure/C5");
    assert!(reports[0]["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
}

#[test]
fn suite_all_covers_every_family_at_odd_rank() {
    let out = qweyl(&["suite", "--name", "all", "--n", "3", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let suites: Vec<&str> =
        v.as_array().unwrap().iter().map(|r| r["suite"].as_str().unwrap()).collect();
    assert_eq!(suites, ["structure/L3", "structure/C3", "cluster/n=3", "poisson/n=3"]);
}

#[test]
fn parse_failures_exit_two_with_a_caret() {
    let out = qweyl(&["nf", "--family", "L", "--n", "3", "x1^(1/2)"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains('^') && err.contains("fractional"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn normal_form_and_bracket_print_plain_expressions() {
    let out = qweyl(&["nf", "--family", "C", "--n", "5", "Omega*x2 - x2*Omega"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "0\n");

    let out = qweyl(&["bracket", "--preset", "FC", "--n", "3", "x1", "x3"]);
    assert!(out.status.success());
    let printed = String::from_utf8_lossy(&out.stdout);
    assert!(printed.trim().contains("x1*x3"), "{printed}");
}

#[test]
fn missing_arguments_exit_two() {
    let out = qweyl(&["nf", "--family", "L", "x1"]);
    assert_eq!(out.status.code(), Some(2));
}
