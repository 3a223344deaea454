use clap::Parser;
use redgreen::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
