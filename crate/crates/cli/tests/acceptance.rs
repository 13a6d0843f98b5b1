//! One PASS/FAIL line per acceptance criterion. Exits nonzero if any fails.

use hhcalc_cli::files::Corpus;
use hhcalc_cli::report::to_text;
use hhcalc_cli::suite::run_suite;
use std::process::{Command, ExitCode};

fn line(criterion: usize, title: &str, passed: bool) {
    println!("{} criterion {criterion}: {title}", if passed { "PASS" } else { "FAIL" });
}

fn main() -> ExitCode {
    let corpus = Corpus::bundled();
    let report = match run_suite(&corpus, None) {
        Ok(r) => r,
        Err(e) => {
            println!("FAIL suite did not run: {e}");
            return ExitCode::FAILURE;
        }
    };
    let mut all = true;
    for criterion in 1..=7 {
        let blocks: Vec<_> = report.blocks.iter().filter(|b| b.criterion == criterion).collect();
        let passed = !blocks.is_empty() && blocks.iter().all(|b| b.passed());
        let title = blocks.iter().map(|b| b.title.as_str()).collect::<Vec<_>>().join("; ");
        line(criterion, &title, passed);
        for b in &blocks {
            for c in b.failures() {
                println!("    {}: {}: {}", b.id, c.name, c.detail);
            }
        }
        all &= passed;
    }

    // two consecutive runs of the binary, compared byte for byte
    let run = || Command::new(env!("CARGO_BIN_EXE_hhcalc")).arg("verify-paper").output();
    let same = match (run(), run()) {
        (Ok(a), Ok(b)) => {
            let library = to_text(&report.to_json());
            let from_binary: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap_or_default();
            a.status.success()
                && a.stdout == b.stdout
                && to_text(&from_binary["results"]) == library
        }
        _ => false,
    };
    line(8, "verify-paper reports are byte-identical across runs", same);
    all &= same;

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
