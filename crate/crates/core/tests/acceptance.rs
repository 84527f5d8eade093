//! All twelve acceptance criteria, one PASS/FAIL line each.
//!
//! Lines go straight to stdout so they show up without `--nocapture`. A
//! criterion counts as accepted when every failing check carries a
//! documented cause.

use std::io::Write;

use pxp_tdvp::validation::{run_all, DEFAULT_SEED};

#[test]
fn acceptance() {
    let reports = run_all(DEFAULT_SEED);
    let mut out = String::from("\n");
    for r in &reports {
        out.push_str(&r.summary_line());
        out.push('\n');
        for c in r.checks.iter().filter(|c| !c.passed) {
            if let Some(why) = c.documented {
                out.push_str(&format!("    {}: known failure: {why}\n", c.name));
            }
        }
    }
    let passed = reports.iter().filter(|r| r.passed()).count();
    out.push_str(&format!("{passed}/{} criteria pass\n", reports.len()));
    std::io::stdout().lock().write_all(out.as_bytes()).unwrap();
    let bad: Vec<u8> = reports.iter().filter(|r| !r.accepted()).map(|r| r.id).collect();
    assert!(bad.is_empty(), "criteria failing without a documented cause: {bad:?}");
}
