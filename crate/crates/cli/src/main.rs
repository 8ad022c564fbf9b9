use clap::Parser;

fn main() {
    let cli = capvar_cli::args::Cli::parse();
    std::process::exit(capvar_cli::main_with(&cli));
}
