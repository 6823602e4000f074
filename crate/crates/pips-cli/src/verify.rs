//! `verify-bounds`: run the library's bound-verification grids and print a
//! pass/fail table.

use crate::CliError;
use pips::bounds::verification::all_checks;

pub fn run(seed: u64, samples: u64) -> Result<(), CliError> {
    let checks = all_checks(seed, samples);
    println!("{:<28}{:>10}{:>12}  result", "check", "cases", "violations");
    let mut all_pass = true;
    for c in &checks {
        all_pass &= c.passed();
        println!(
            "{:<28}{:>10}{:>12}  {}",
            c.name,
            c.cases,
            c.violations,
            if c.passed() { "PASS" } else { "FAIL" }
        );
    }
    if all_pass {
        Ok(())
    } else {
        Err(CliError::CheckFailed("bound verification failed".into()))
    }
}
