use clap::Parser;

fn main() {
    let cli = sechom::Cli::parse();
    std::process::exit(sechom::run(&cli.job()).code());
}
