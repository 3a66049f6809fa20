mod config;
mod report;
mod scenarios;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use config::{Cli, RunConfig, SEED_ENV};

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match RunConfig::new(cli, std::env::var(SEED_ENV).ok()) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };

    let started = Instant::now();
    let log = scenarios::Log::new(cfg.verbose);
    let aggregate = match scenarios::run(&cfg, &log) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {} failed: {e}", cfg.scenario.name());
            return ExitCode::from(EXIT_FAILED);
        }
    };
    let report = aggregate.into_report(&cfg, started.elapsed());

    if let Err(e) = report::write_report(&report, &cfg) {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(EXIT_IO);
    }
    if report.passed(cfg.tolerance) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED)
    }
}
