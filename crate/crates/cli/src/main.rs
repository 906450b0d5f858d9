use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ultrawave_cli::{invoke, Experiment};

/// Run one ultrahyperbolic experiment and write its report.
///
/// Exit status: 0 when every check passes, 1 when a check fails, 2 on
/// invalid input.
#[derive(Parser, Debug)]
#[command(name = "ultrawave", version)]
struct Args {
    experiment: Experiment,
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match invoke(args.experiment, &args.config, args.seed, args.out) {
        Ok((report, dir)) => {
            println!("report: {}", dir.join("report.txt").display());
            if report.passed {
                println!("{}: all {} checks passed", report.experiment, report.checks.len());
                ExitCode::SUCCESS
            } else {
                for c in report.failures() {
                    eprintln!("check failed: {} (value {:e})", c.name, c.value);
                }
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
