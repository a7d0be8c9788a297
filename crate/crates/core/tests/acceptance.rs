//! Acceptance battery: runs every criterion at its stated tolerance and
//! prints one pass/fail line per criterion.

use std::process::ExitCode;

use xratio::suite;

const SEED: u64 = 42;

fn main() -> ExitCode {
    let checks = suite::run(SEED);
    assert_eq!(checks.len(), 12, "expected twelve criteria");
    println!("acceptance (seed {SEED})");
    for c in &checks {
        println!(
            "{} {:<28} worst {:>10.3e}  tol {:.0e}  {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.worst,
            c.tolerance,
            c.detail
        );
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    println!("{} of {} criteria pass", checks.len() - failed, checks.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
