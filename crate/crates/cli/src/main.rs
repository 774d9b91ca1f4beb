mod args;
mod check;
mod config;
mod error;
mod io;
mod plot;
mod qp;
mod svm;
mod trace;
mod tv;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use config::apply_config;
use error::CliResult;

fn run(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::Tv(a) => {
            let path = a.config.clone();
            tv::run(apply_config(a, path.as_deref())?)
        }
        Command::Svm(a) => {
            let path = a.config.clone();
            svm::run(apply_config(a, path.as_deref())?)
        }
        Command::Qp(a) => {
            let path = a.config.clone();
            qp::run(apply_config(a, path.as_deref())?)
        }
        Command::Check(a) => {
            let path = a.config.clone();
            check::run(apply_config(a, path.as_deref())?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
