use std::process::ExitCode;

use clap::Parser;
use kronsum::cli::{run, Cli};

fn main() -> ExitCode {
    run(Cli::parse())
}
