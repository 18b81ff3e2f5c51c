use clap::Parser;
use phasekit_cli::app::{run, Cli};

fn main() {
    let cli = Cli::parse();
    std::process::exit(run(&cli));
}
