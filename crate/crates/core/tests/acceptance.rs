//! One line per acceptance criterion, printed on every run against the full `all` report at seed 42.
//!
//! Criteria 2 and 3 are expected to fail: the line-space structure J2 is integrable, and the
//! conformal chart pulls back to a multiple of G rather than G itself. The test asserts that
//! exactly those two fail, so a regression anywhere else or an unexpected pass both show up.

use std::collections::BTreeSet;

use paraplex::report::{Check, VerificationReport};
use paraplex::suites::run_suite;

struct Criterion {
    number: u32,
    title: &'static str,
    select: fn(&Check) -> bool,
}

fn non_engine(c: &Check, prefix: &str) -> bool {
    c.id.starts_with(prefix) && !c.id.contains(".engine.")
}

const CRITERIA: [Criterion; 9] = [
    Criterion { number: 1, title: "line-space curvature battery", select: |c| c.id.starts_with("linespace.battery.") },
    Criterion { number: 2, title: "line-space structures J0, J1, J2", select: |c| c.id.starts_with("linespace.structures.") },
    Criterion { number: 3, title: "conformal chart, Pluecker route and reflection", select: |c| c.id.starts_with("linespace.conformal.") },
    Criterion { number: 4, title: "geodesic spaces of space forms", select: |c| non_engine(c, "geodesic-spaces.") },
    Criterion { number: 5, title: "product metrics", select: |c| non_engine(c, "products.") },
    Criterion { number: 6, title: "plane-field invariants", select: |c| non_engine(c, "planefields.") },
    Criterion { number: 7, title: "PDE residuals", select: |c| non_engine(c, "pde.") },
    Criterion { number: 8, title: "topology by quadrature and obstructions", select: |c| c.id.starts_with("topology.") },
    Criterion { number: 9, title: "engine self-checks", select: |c| c.id.contains(".engine.") },
];

const EXPECTED_FAILURES: [u32; 2] = [2, 3];

fn evaluate(report: &VerificationReport) -> BTreeSet<u32> {
    let mut failing = BTreeSet::new();
    for cr in &CRITERIA {
        let checks: Vec<&Check> = report.checks.iter().filter(|c| (cr.select)(c)).collect();
        let bad: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.id.as_str()).collect();
        let pass = !checks.is_empty() && bad.is_empty();
        if pass {
            println!("criterion {}: PASS  {} ({} checks)", cr.number, cr.title, checks.len());
        } else {
            failing.insert(cr.number);
            println!("criterion {}: FAIL  {} ({}/{} checks failed: {})", cr.number, cr.title, bad.len(), checks.len(), bad.join(", "));
        }
    }
    failing
}

fn main() {
    let report = run_suite("all", 42, 1.0).expect("suite runs");
    assert!(report.checks.iter().all(Check::consistent));
    let failing = evaluate(&report);
    assert_eq!(failing, BTreeSet::from(EXPECTED_FAILURES), "failing criteria changed");
    assert_eq!(report.failed_ids(), ["linespace.conformal.pullback", "linespace.structures.nijenhuis.j2"]);
    assert_eq!(report.exit_code(), 1);
    println!("acceptance: failing criteria are exactly {EXPECTED_FAILURES:?}, as expected");
}
