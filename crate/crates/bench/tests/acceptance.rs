//! Runs every numbered criterion once and prints one line per result.
//! Exits nonzero if any criterion fails.

use nagfree_bench::criteria;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcomes = criteria::run_all();
    for o in &outcomes {
        println!("{o}");
    }
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    println!(
        "acceptance: {} passed, {} failed {failed:?}",
        outcomes.len() - failed.len(),
        failed.len()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
