// Copyright 2026 The wcount Authors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the table is printed on every run; exits nonzero if any criterion fails.
//! The seed can be overridden with `WCOUNT_SEED`, and `WCOUNT_CRITERION=k`
//! runs criterion `k` alone.

use std::process::ExitCode;

use wcount::suite::{check_names, run_check};

fn main() -> ExitCode {
    let seed = std::env::var("WCOUNT_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(20_260_101);
    println!("acceptance (seed {seed})");
    let mut failed = 0;
    let only: Option<usize> = std::env::var("WCOUNT_CRITERION").ok().and_then(|s| s.parse().ok());
    for (i, _) in check_names().iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let report = run_check(i, seed);
        println!("criterion {:>2}: {report}", i + 1);
        for f in report.failures.iter().skip(1).take(4) {
            println!("              also: {}", f.lines().next().unwrap_or_default());
        }
        failed += usize::from(!report.passed());
    }
    println!("{} of {} criteria passed", check_names().len() - failed, check_names().len());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
