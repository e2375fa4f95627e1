use clap::Parser;
use clsets::cli::{execute, Cli};

fn main() {
    let cli = Cli::parse();
    let code = execute(cli, &mut std::io::stdout());
    std::process::exit(code);
}
