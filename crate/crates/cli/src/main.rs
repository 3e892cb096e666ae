use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use env_logger::Env;

use gpcg_cli::{run, Cli, EXIT_USAGE};

fn main() -> ExitCode {
    env_logger::Builder::from_env(Env::new().filter_or("GPCG_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(&cli) {
        Ok(done) => {
            let _ = std::io::stdout().write_all(done.stdout.as_bytes());
            ExitCode::from(done.exit_code)
        }
        Err(e) => {
            eprintln!("gpcg: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
