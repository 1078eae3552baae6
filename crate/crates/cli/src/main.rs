use std::process::ExitCode;

use clap::Parser;
use fgig_cli::{run, Manifest};

fn main() -> ExitCode {
    let manifest = Manifest::parse();
    match run(&manifest) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
