use clap::Parser;

fn main() {
    let cli = tfqkd_cli::Cli::parse();
    std::process::exit(tfqkd_cli::run(cli));
}
