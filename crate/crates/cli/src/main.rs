mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    let result = commands::run(&cli.common, &cli.command).and_then(|report| {
        report.emit(cli.common.out.as_deref(), cli.common.plot_data.as_deref())?;
        match report.failure {
            Some(e) => Err(e.into()),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", output::error_json(&e));
            ExitCode::FAILURE
        }
    }
}
