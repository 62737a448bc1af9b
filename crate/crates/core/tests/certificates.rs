use std::fs;

use quatlink::certificate::{explain, verify_certificate, Certificate, CertificateFile, RunConfig, SCHEMA_VERSION};
use quatlink::suite::{run_paper_suite, ExpectedValues};
use quatlink::valuation::Value;
use quatlink::Error;

const FILES: [&str; 5] = ["prop_no4.json", "lemma_classes.json", "link3.json", "construct3.json", "qform.json"];

fn suite_config() -> RunConfig {
    RunConfig {
        command: "paper suite".into(),
        ..RunConfig::default()
    }
}

#[test]
fn suite_writes_verifiable_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_paper_suite(&suite_config(), &ExpectedValues::default(), dir.path()).unwrap();
    assert!(report.passed(), "{:?}", report.first_failure());
    assert_eq!(report.items.len(), 5);
    for name in FILES {
        let text = fs::read_to_string(dir.path().join(name)).unwrap();
        let cert = CertificateFile::from_json(&text).unwrap();
        assert_eq!(cert.schema_version, SCHEMA_VERSION);
        assert_eq!(cert.to_json(), text, "{name} re-serializes byte for byte");
        assert!(verify_certificate(&cert).unwrap().ok(), "{name}");
        assert!(explain(&cert).starts_with("quatlink "));
    }
    let prop = CertificateFile::load(&dir.path().join("prop_no4.json")).unwrap();
    assert!(explain(&prop)
        .trim_end()
        .ends_with("intersection empty; w4 = (1,1/2) > (1/2,1/2); not linked"));
}

#[test]
fn corrupted_expectations_name_the_item() {
    let dir = tempfile::tempdir().unwrap();
    let expected = ExpectedValues {
        w_fourth: Value::frac(1, 2, 1, 2),
        ..ExpectedValues::default()
    };
    let report = run_paper_suite(&suite_config(), &expected, dir.path()).unwrap();
    assert!(!report.passed());
    assert_eq!(report.first_failure().unwrap().name, "prop-no4");

    let expected = ExpectedValues {
        constructor_degrees: vec![3, 3, 3],
        ..ExpectedValues::default()
    };
    let report = run_paper_suite(&suite_config(), &expected, dir.path()).unwrap();
    assert_eq!(report.first_failure().unwrap().name, "construct3");
}

#[test]
fn tampered_files_fail_verification() {
    let dir = tempfile::tempdir().unwrap();
    run_paper_suite(&suite_config(), &ExpectedValues::default(), dir.path()).unwrap();

    let mut cert = CertificateFile::load(&dir.path().join("prop_no4.json")).unwrap();
    if let Certificate::NonLinkage(c) = &mut cert.body {
        c.w_fourth = Value::frac(1, 2, 1, 2);
    }
    assert!(!verify_certificate(&cert).unwrap().ok());

    let mut cert = CertificateFile::load(&dir.path().join("link3.json")).unwrap();
    if let Certificate::Linkage(c) = &mut cert.body {
        c.datum = format!("{} + 1", c.datum);
    }
    assert!(!verify_certificate(&cert).unwrap().ok());

    let mut cert = CertificateFile::load(&dir.path().join("qform.json")).unwrap();
    cert.schema_version += 1;
    let report = verify_certificate(&cert).unwrap();
    assert_eq!(report.failures()[0].name, "schema version");
}

#[test]
fn truncated_json_reports_a_position() {
    let dir = tempfile::tempdir().unwrap();
    run_paper_suite(&suite_config(), &ExpectedValues::default(), dir.path()).unwrap();
    let text = fs::read_to_string(dir.path().join("lemma_classes.json")).unwrap();
    let err = CertificateFile::from_json(&text[..text.len() / 2]).unwrap_err();
    match err {
        Error::Certificate(msg) => assert!(msg.contains("line"), "{msg}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn header_records_the_run() {
    let config = RunConfig {
        command: "link3".into(),
        budget: Some(77),
        ..RunConfig::default()
    };
    assert_eq!(
        config.header(),
        format!(
            "quatlink {} (schema {SCHEMA_VERSION}) command=link3 field=F2(a,b) seed=0 budget=77 cap=2",
            env!("CARGO_PKG_VERSION")
        )
    );
}
