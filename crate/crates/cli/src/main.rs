use clap::Parser;
use hcquad_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = hcquad_cli::run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
