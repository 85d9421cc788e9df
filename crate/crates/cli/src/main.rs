use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use sharpconvex::parallel::with_jobs;
use sharpconvex::{run, Cli, RunConfig};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(2),
            };
        }
    };
    let cfg = match RunConfig::from_cli(cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}\n\nFor more information, try '--help'.");
            return ExitCode::from(2);
        }
    };
    let outcome = with_jobs(cfg.jobs, || run(&cfg));
    match outcome {
        Ok(report) => {
            if let Err(e) = report.write(&cfg) {
                eprintln!("error: cannot write report: {e}");
                return ExitCode::from(1);
            }
            eprintln!("{}", report.summary_line());
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
