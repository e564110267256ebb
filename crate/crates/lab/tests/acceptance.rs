use std::process::ExitCode;
use std::time::Instant;

use horizon_lab::config::DEFAULT_SEED;
use horizon_lab::verify::{VerifyContext, CRITERIA};
use horizon_lab::Tolerances;

fn main() -> ExitCode {
    let ctx = VerifyContext::new(Tolerances::default(), DEFAULT_SEED);
    let mut failed = 0;
    for (k, (name, criterion)) in CRITERIA.iter().enumerate() {
        let start = Instant::now();
        let result = criterion(&ctx);
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(outcome) => {
                let bad: Vec<_> = outcome.checks.iter().filter(|c| !c.pass).collect();
                let ok = bad.is_empty() && !outcome.checks.is_empty();
                println!(
                    "[{}] criterion {:>2} {name}: {} checks, {} failed, {secs:.2} s",
                    if ok { "PASS" } else { "FAIL" },
                    k + 1,
                    outcome.checks.len(),
                    bad.len()
                );
                for c in bad {
                    println!("       {}", c.line());
                }
                if !ok {
                    failed += 1;
                }
            }
            Err(e) => {
                println!("[FAIL] criterion {:>2} {name}: error: {e}", k + 1);
                failed += 1;
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
