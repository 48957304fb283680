//! The named invariant batteries must pass and reproduce byte-identically
//! under a fixed seed.

use multscan_core::arith::sieve;
use multscan_core::verify;

#[test]
fn all_suites_pass_and_reproduce() {
    let table = sieve(1_000_000).unwrap();
    let reports = verify::run_suite("all", 42, &table).unwrap();
    for suite in &reports {
        for check in &suite.checks {
            assert!(check.passed, "{}::{} failed: {}", suite.suite, check.name, check.detail);
        }
    }
    let bytes1 = serde_json::to_vec(&reports).unwrap();
    let reports2 = verify::run_suite("all", 42, &table).unwrap();
    let bytes2 = serde_json::to_vec(&reports2).unwrap();
    assert_eq!(bytes1, bytes2, "verify reports must be byte-identical under a fixed seed");
}

#[test]
fn unknown_suite_rejected() {
    let table = sieve(10_000).unwrap();
    assert!(verify::run_suite("nope", 1, &table).is_err());
}
