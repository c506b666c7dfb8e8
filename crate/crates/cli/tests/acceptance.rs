//! One line per acceptance criterion. Criteria run one after another so that the time
//! limits measure a single case at a time.

use std::process::ExitCode;
use std::time::Duration;

use chainrec::symmetry::DEFAULT_BUDGET;
use chainrec_cli::verify::{cases, Settings, DEFAULT_SEED};

/// Wall-clock limit for all cases of a criterion together.
const LIMITS: [(u8, u64); 11] =
    [(1, 1), (2, 10), (3, 60), (4, 5), (5, 5), (6, 5), (7, 5), (8, 20), (9, 120), (10, 1), (11, 300)];

fn main() -> ExitCode {
    let settings = Settings { seed: DEFAULT_SEED, budget: DEFAULT_BUDGET };
    let all = cases();
    let mut failed = Vec::new();
    for (criterion, limit) in LIMITS {
        let mut total = Duration::ZERO;
        let mut pass = true;
        let mut parts = Vec::new();
        let mut notes = Vec::new();
        for case in all.iter().filter(|c| c.criterion == criterion) {
            let (report, elapsed) = case.run(&settings);
            total += elapsed;
            let in_time = elapsed <= case.time_limit;
            pass &= report.passed && in_time;
            let ok = report.checks.iter().filter(|c| c.passed).count();
            parts.push(format!(
                "{} {}/{} checks {:.2}s of {}s",
                report.id,
                ok,
                report.checks.len(),
                elapsed.as_secs_f64(),
                case.time_limit.as_secs()
            ));
            for c in report.checks.iter().filter(|c| !c.passed) {
                notes.push(format!("{}: {}", c.name, c.detail));
            }
            if let Some(e) = report.error {
                notes.push(format!("error: {e}"));
            }
            if !in_time {
                notes.push(format!("{} over its time limit", report.id));
            }
        }
        if total > Duration::from_secs(limit) {
            pass = false;
            notes.push(format!("total {:.2}s over {limit}s", total.as_secs_f64()));
        }
        let status = if pass { "PASS" } else { "FAIL" };
        println!("criterion {criterion:>2}: {status} [{}]", parts.join("; "));
        for n in notes {
            println!("              {n}");
        }
        if !pass {
            failed.push(criterion);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
