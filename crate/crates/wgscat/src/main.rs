use std::process::ExitCode;

use clap::Parser;
use wgscat::{resolve, run, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match resolve(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("wgscat: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&cfg) {
        Ok(s) => {
            eprintln!(
                "wgscat {}: {} points, {} failed, {:.2} s -> {}",
                cfg.command,
                s.points,
                s.failed,
                s.wall_time_s,
                cfg.output.display()
            );
            if s.failed > 0 {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e @ CliError::Usage(_)) => {
            eprintln!("wgscat: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("wgscat: {e}");
            ExitCode::FAILURE
        }
    }
}
