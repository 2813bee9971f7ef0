use std::panic;
use std::process::ExitCode;

use clap::Parser;

use rumor::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("rumor: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        // the panic hook has already printed the message
        Err(_) => ExitCode::from(3),
    }
}
