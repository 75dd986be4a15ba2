use std::process::ExitCode;

use clap::Parser;
use kgraph_cli::{run, Cli, RunConfig};

fn main() -> ExitCode {
    let config = RunConfig::from(Cli::parse());
    let (report, code) = run(&config);
    if config.options.json {
        print!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    ExitCode::from(code as u8)
}
