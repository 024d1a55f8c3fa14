//! Frozen config and catalog files against the code, and suite-level contracts.

use std::collections::BTreeSet;
use std::path::PathBuf;

use hdx_core::check::ids;
use hdx_core::harness::{run_suite, SuiteConfig, CATALOG, REPORTED, SUITES};
use hdx_core::Error;

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

#[test]
fn frozen_default_config_matches_code() {
    let cfg = SuiteConfig::from_file(&configs().join("default.json")).unwrap();
    assert_eq!(cfg, SuiteConfig::default());
    assert_eq!(cfg.hash(), SuiteConfig::default().hash());
    for id in REPORTED {
        assert_eq!(cfg.ceiling(id, 3), 2f64.powi(30));
    }
}

#[test]
fn catalog_file_matches_code() {
    let text = std::fs::read_to_string(configs().join("catalog.json")).unwrap();
    let file: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(file, serde_json::to_value(CATALOG).unwrap());
    let listed: Vec<&str> = CATALOG.iter().map(|e| e.id).collect();
    assert_eq!(listed, ids::ALL.to_vec());
    assert_eq!(listed.iter().collect::<BTreeSet<_>>().len(), listed.len());
}

#[test]
fn config_without_a_ceiling_is_rejected() {
    let mut cfg = SuiteConfig::default();
    cfg.ceilings.remove(ids::KRUSKAL_KATONA);
    assert!(matches!(cfg.validate(), Err(Error::InvalidArgument(_))));
    let mut cfg = SuiteConfig::default();
    cfg.tolerances.relative = 1e-6;
    assert!(cfg.validate().is_err());
}

#[test]
fn default_suite_covers_every_check() {
    let run = run_suite("default", &SuiteConfig::default()).unwrap();
    let seen: BTreeSet<&str> = run.records.iter().map(|r| r.check_id.as_str()).collect();
    for id in ids::ALL {
        assert!(seen.contains(id), "{id} missing");
    }
    let by_suite: usize = SUITES.iter().map(|s| run_suite(s, &SuiteConfig::default()).unwrap().records.len()).sum();
    assert_eq!(by_suite, run.records.len());
}

#[test]
fn unknown_suite_is_an_error() {
    assert!(matches!(run_suite("nope", &SuiteConfig::default()), Err(Error::UnknownSuite(_))));
}
