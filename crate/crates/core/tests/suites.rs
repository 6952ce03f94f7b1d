use affiq::experiments::{run_suite, suite_names};
use affiq::{BodyCatalog, Error, SuiteConfig};

fn passes(name: &str) {
    let r = run_suite(name, &BodyCatalog::builtin(), &SuiteConfig::new(1)).unwrap();
    let failures: Vec<_> = r.failures().map(|c| &c.case).collect();
    assert!(r.pass, "{name}: {failures:?}");
    assert!(!r.cases.is_empty());
}

#[test]
fn dichotomy() {
    passes("dichotomy");
}

#[test]
fn slab_body() {
    passes("slab");
}

#[test]
fn local_min_probe() {
    passes("local-min");
}

#[test]
fn unknown_suite() {
    let err = run_suite("nope", &BodyCatalog::builtin(), &SuiteConfig::new(1)).unwrap_err();
    assert!(matches!(err, Error::UnknownName(_)));
    assert_eq!(suite_names().count(), 14);
}

#[test]
fn zero_budget_is_rejected() {
    let cfg = SuiteConfig { budget: Some(0), ..SuiteConfig::new(1) };
    assert!(run_suite("lutwak", &BodyCatalog::builtin(), &cfg).is_err());
}

#[test]
fn reports_round_trip_through_csv_columns() {
    let r = run_suite("geometry", &BodyCatalog::builtin(), &SuiteConfig::new(2)).unwrap();
    let csv = r.to_csv();
    assert_eq!(csv.lines().count(), r.cases.len() + 1);
    for line in csv.lines().skip(1) {
        assert_eq!(line.split(',').count(), 13, "{line}");
    }
}
