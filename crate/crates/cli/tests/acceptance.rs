//! Acceptance suite: every criterion at its stated tolerance, one line each,
//! then the same suite through the `grkhs verify` binary.

use std::process::{Command, ExitCode};
use std::time::Instant;

use grkhs::verify::{run_check, CHECK_COUNT};

fn main() -> ExitCode {
    let mut failed = 0;
    for id in 1..=CHECK_COUNT {
        let start = Instant::now();
        let o = run_check(id);
        println!("{o} ({:.2} s)", start.elapsed().as_secs_f64());
        if !o.passed {
            failed += 1;
        }
    }

    // the binary must agree, exit 0 and be byte-identical across runs
    let bin = env!("CARGO_BIN_EXE_grkhs");
    let runs: Vec<_> = (0..2)
        .map(|_| Command::new(bin).arg("verify").output().expect("run grkhs verify"))
        .collect();
    let cli_ok = runs.iter().all(|r| r.status.code() == Some(0)) && runs[0].stdout == runs[1].stdout;
    println!(
        "[{}] cli verify: exit {:?}, identical output {}",
        if cli_ok { "PASS" } else { "FAIL" },
        runs[0].status.code(),
        runs[0].stdout == runs[1].stdout
    );
    if !cli_ok {
        failed += 1;
    }

    println!("{} of {} acceptance checks passed", CHECK_COUNT + 1 - failed, CHECK_COUNT + 1);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
