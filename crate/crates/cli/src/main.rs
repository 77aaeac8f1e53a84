use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use poisson_sums_cli::{run, Cli};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(outcome) => {
            if outcome.written_to.is_none() {
                let _ = std::io::stdout()
                    .lock()
                    .write_all(outcome.output.as_bytes());
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("poisson-sums: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
