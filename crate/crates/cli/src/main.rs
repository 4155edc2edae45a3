use clap::Parser;

fn main() {
    std::process::exit(tempus_cli::main_with(tempus_cli::Cli::parse()));
}
