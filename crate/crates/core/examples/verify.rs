//! The quick verification suite.

use accperc::experiments::{run_verification_suite, Budget, SuiteOptions};

fn main() {
    let report = run_verification_suite(&SuiteOptions::new(Budget::Quick, 0));
    for c in &report.checks {
        println!("{:?} {:<30} {:.4e} (tol {:.1e})", c.status, c.check_name, c.measured, c.tolerance);
    }
    std::process::exit(if report.all_passed() { 0 } else { 1 });
}
