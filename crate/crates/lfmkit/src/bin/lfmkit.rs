use clap::Parser;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = lfmkit::cli::Cli::parse();
    match lfmkit::cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
