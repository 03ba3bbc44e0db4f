use strato_moyal::report::{parse_config, run_suites_with, VerificationReport};
use strato_moyal::Exec;

fn config() -> strato_moyal::report::RunConfig {
    parse_config(r#"{"suites": ["algebra", "poisson", "moyal"]}"#).unwrap()
}

#[test]
fn sequential_and_parallel_reports_match() {
    let cfg = config();
    let seq = run_suites_with(&cfg, Exec::Sequential).to_canonical_json();
    let par = run_suites_with(&cfg, Exec::Parallel).to_canonical_json();
    assert_eq!(seq, par);
}

#[test]
fn canonical_json_round_trips() {
    let report = run_suites_with(&config(), Exec::default());
    let text = report.to_canonical_json();
    let back = VerificationReport::from_json(&text).unwrap();
    assert_eq!(back.to_canonical_json(), text);
    assert_eq!(back.records.len(), report.records.len());
}

#[test]
fn report_shape_is_stable() {
    let report = run_suites_with(&config(), Exec::default());
    assert!(report.all_pass());
    let ids: Vec<_> = report.records.iter().map(|r| format!("{}/{}", r.suite, r.check_id)).collect();
    let mut sorted = ids.clone();
    sorted.dedup();
    assert_eq!(ids.len(), sorted.len(), "duplicate check ids");
    for want in ["algebra/wick-commutativity", "poisson/bracket-jacobi", "moyal/star-associativity"] {
        assert!(ids.iter().any(|i| i == want), "{want} missing");
    }
    let text = report.to_canonical_json();
    for key in ["\"anchor\"", "\"check_id\"", "\"n_instances\"", "\"relation\"", "\"residual\"", "\"versions\""] {
        assert!(text.contains(key), "{key}");
    }
}
