mod common;

use serde_json::Value;
use superwitt::report::ReportDocument;
use superwitt::verifier::{run_check, CheckId, CheckParams, Status};
use superwitt::witt::BracketMode;

fn validator() -> jsonschema::Validator {
    let text = std::fs::read_to_string(common::fixture("report.schema.json")).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn assert_valid(json: &str) {
    let v: Value = serde_json::from_str(json).unwrap();
    let errors: Vec<String> = validator().iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:#?}\n{json}");
}

fn oracle_params(mode: BracketMode) -> CheckParams {
    let mut p = CheckParams::defaults(CheckId::BracketOracle).with_shape(1, 1);
    p.degree = 2;
    p.bracket_mode = mode;
    p
}

#[test]
fn empty_document_is_valid() {
    assert_valid(&ReportDocument::new(Vec::new(), 1, true).to_json());
}

#[test]
fn fail_and_error_reports_are_valid() {
    let fail = run_check(CheckId::BracketOracle, &oracle_params(BracketMode::Verbatim));
    assert_eq!(fail.status, Status::Fail);
    let mut p = CheckParams::defaults(CheckId::Descent);
    p.a = vec!["1".into(), "0".into()];
    let error = run_check(CheckId::Descent, &p);
    assert_eq!(error.status, Status::Error);
    let mutated = run_check(CheckId::Jacobi, &{
        let mut p = CheckParams::defaults(CheckId::Jacobi).with_shape(1, 1);
        p.degree = 1;
        p.bracket_mode = BracketMode::Mutated(1);
        p
    });
    let doc = ReportDocument::new(vec![fail, error, mutated], 5, true);
    assert_valid(&doc.to_json());
    assert_eq!(ReportDocument::from_json(&doc.to_json()).unwrap(), doc);
}

#[test]
fn schema_rejects_fail_without_counterexample() {
    let mut doc = ReportDocument::new(
        vec![run_check(CheckId::BracketOracle, &oracle_params(BracketMode::Verbatim))],
        5,
        true,
    );
    doc.checks[0].counterexample = None;
    let v: Value = serde_json::from_str(&doc.to_json()).unwrap();
    assert!(!validator().is_valid(&v));
    assert!(ReportDocument::from_json(&doc.to_json()).is_err());
}

#[test]
fn stable_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = common::fixture("small.toml");
    let mut outputs = Vec::new();
    for name in ["a.json", "b.json"] {
        let path = dir.path().join(name);
        let (code, _, err) = common::run(&[
            "report",
            "--config",
            config.to_str().unwrap(),
            "--out",
            path.to_str().unwrap(),
            "--stable",
        ]);
        assert_eq!(code, 0, "{err}");
        outputs.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs.pop().unwrap()).unwrap();
    assert_valid(&text);
    let doc = ReportDocument::from_json(&text).unwrap();
    assert_eq!(doc.to_json(), text);
}

#[test]
fn counterexamples_replay() {
    let report = run_check(CheckId::BracketOracle, &oracle_params(BracketMode::Verbatim));
    let cx = report.counterexample.unwrap();
    let [x, y, shape] = cx.inputs.as_slice() else {
        panic!("{cx:?}")
    };
    assert_eq!(shape, "m=1 n=1");
    let (_, corrected, _) = common::run(&["bracket", x, y, "--m", "1", "--n", "1"]);
    let (_, verbatim, _) = common::run(&["bracket", x, y, "--m", "1", "--n", "1", "--mode", "verbatim"]);
    // the table side is the verbatim bracket, the operator side agrees with the corrected one
    assert_eq!(verbatim.trim(), cx.lhs);
    assert_eq!(corrected.trim(), cx.rhs);
}
