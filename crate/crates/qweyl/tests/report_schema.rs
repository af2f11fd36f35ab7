//! Pins the JSON shape of suite reports against a golden file. Any change
//! to field names, casing, or the witness-omission rule fails here before it
//! can break downstream consumers.

use qweyl::report::{Report, Status};

const GOLDEN: &str = include_str!("golden/report.json");

fn demo_report() -> Report {
    let mut rep = Report::new("demo/n=2");
    rep.check("zx/i=1", "tower straightening", true, || unreachable!("witness is lazy"));
    rep.check("omega-central/k=2", "central element commutes", false, || {
        "lhs = q*x1, rhs = x1".to_string()
    });
    rep
}

#[test]
fn report_serialization_matches_the_golden_file() {
    let rendered = serde_json::to_string_pretty(&demo_report()).unwrap();
    assert_eq!(rendered.trim_end(), GOLDEN.trim_end());
}

#[test]
fn golden_file_deserializes_losslessly() {
    let rep: Report = serde_json::from_str(GOLDEN).unwrap();
    assert_eq!(rep.suite, "demo/n=2");
    assert_eq!(rep.checks.len(), 2);
    assert_eq!(rep.checks[0].status, Status::Pass);
    assert_eq!(rep.checks[0].witness, None);
    assert_eq!(rep.checks[1].status, Status::Fail);
    assert_eq!(rep.checks[1].witness.as_deref(), Some("lhs = q*x1, rhs = x1"));
    assert!(!rep.passed());
    // a passing check never serializes a witness field
    let value: serde_json::Value = serde_json::from_str(GOLDEN).unwrap();
    assert!(value["checks"][0].get("witness").is_none());
    // round trip back to the same bytes
    let again = serde_json::to_string_pretty(&rep).unwrap();
    assert_eq!(again.trim_end(), GOLDEN.trim_end());
}

#[test]
fn real_suite_reports_obey_the_same_schema() {
    let rep = qweyl::pbw::suite_structure(qweyl::pbw::Family::Linear, 2).unwrap();
    let value = serde_json::to_value(&rep).unwrap();
    assert!(value["suite"].is_string());
    let checks = value["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        assert!(c["id"].is_string());
        assert!(c["tag"].is_string());
        assert!(matches!(c["status"].as_str(), Some("pass" | "fail")));
        let extra: Vec<&String> = c
            .as_object()
            .unwrap()
            .keys()
            .filter(|k| !matches!(k.as_str(), "id" | "tag" | "status" | "witness"))
            .collect();
        assert!(extra.is_empty(), "unexpected report fields: {extra:?}");
    }
}
