use clap::Parser;
use rankone_cli::commands::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(rankone_cli::exit_code(&e));
    }
}
