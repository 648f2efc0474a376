//! Run a suite in-process and inspect the report.
//!
//! cargo run --example verification_report -- topology

use paraplex::suites;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let suite = std::env::args().nth(1).unwrap_or_else(|| "products".into());
    let report = suites::run_suite(&suite, 42, 1.0)?;
    for c in &report.checks {
        let mark = if c.pass { "ok  " } else { "FAIL" };
        println!("{mark} {:<44} {:>10.3e} {:?} {:.1e}", c.id, c.residual, c.comparison, c.tolerance);
    }
    println!("{}/{} passed, tables: {:?}", report.summary.passed, report.summary.total, report.tables.keys().collect::<Vec<_>>());

    let loose = suites::run_suite(&suite, 42, 10.0)?;
    println!("with tolerances x10: {}/{} passed", loose.summary.passed, loose.summary.total);
    Ok(())
}
