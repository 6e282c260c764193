use std::process::ExitCode;

use lorentz_gm::suite;

const SEED: u64 = 42;

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for id in 1..=suite::CRITERIA {
        let r = suite::run_one(id, SEED).expect("criterion exists");
        println!("{}", r.line());
        if !(r.pass() && r.within_budget()) {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: {} of {} criteria passed (seed {SEED})", suite::CRITERIA, suite::CRITERIA);
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
