//! Runs every verification suite with its default range and prints one line each.
//!
//! `cargo run --release --example verify_lemmas`

use std::time::Instant;

use locsym::lab::{run_suite, SuiteParams, SUITES};

fn main() -> locsym::Result<()> {
    let params = SuiteParams { seed: 1, ..SuiteParams::default() };
    for name in SUITES {
        let start = Instant::now();
        let rep = run_suite(name, &params)?;
        println!(
            "{:<24} {:<4} checked={:<9} violations={:<3} min_slack={:<12} inapplicable={} ({:.2?})",
            name,
            if rep.passed { "ok" } else { "FAIL" },
            rep.checked,
            rep.violations.len(),
            rep.max_slack.map_or("-".to_string(), |s| format!("{s:.3e}")),
            rep.inapplicable.len(),
            start.elapsed()
        );
    }
    Ok(())
}
