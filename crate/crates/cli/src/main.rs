use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use clap::Parser;
use viewdir_cli::args::Cli;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("VIEWDIR_LOG", "warn")).init();
    let cli = Cli::parse();
    let code = match catch_unwind(AssertUnwindSafe(|| viewdir_cli::execute(&cli))) {
        Ok(Ok(())) => 0,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
        Err(_) => {
            eprintln!("error: internal failure (panic)");
            5
        }
    };
    ExitCode::from(code as u8)
}
