mod args;
mod commands;
mod error;
mod output;
mod render;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::{CliError, CliResult};

fn dispatch(command: &Command) -> CliResult<()> {
    match command {
        Command::Run(a) => commands::run(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::CondBias(a) => commands::cond_bias(a),
        Command::Scatter(a) => commands::scatter(a),
        Command::CiProfile(a) => commands::ci_profile(a),
        Command::Resonance(a) => commands::resonance(a),
        Command::Render(a) => render::render(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("iqae: thread pool: {e}");
            return ExitCode::from(3);
        }
    };
    match pool.install(|| dispatch(&cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("iqae: {e}");
            report_code(&e)
        }
    }
}

fn report_code(e: &CliError) -> ExitCode {
    ExitCode::from(e.exit_code() as u8)
}
