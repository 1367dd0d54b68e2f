//! Runs the fast comparison suites and prints their rows.

use coulomb_linstat::compare::{run_suite, SuiteOverrides};

fn main() -> coulomb_linstat::Result<()> {
    for suite in ["cumulants-closed-vs-jet", "cgf-coulomb-vs-det", "rate-closed-vs-parametric", "ginse-sanity"] {
        let report = run_suite(suite, &SuiteOverrides::default())?;
        println!("{suite}: {}", if report.passed { "pass" } else { "FAIL" });
        for r in &report.rows {
            let gap = r.value_a.zip(r.value_b).map(|(a, b)| (a - b).abs());
            println!("  {:<22} gap {:<12.3e} {}", r.id, gap.unwrap_or(f64::NAN), r.error.as_deref().unwrap_or(""));
        }
    }
    Ok(())
}
