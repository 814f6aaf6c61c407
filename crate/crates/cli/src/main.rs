use clap::Parser;

fn main() {
    let cli = fklab_cli::Cli::parse();
    fklab_cli::configure_threads();
    std::process::exit(fklab_cli::execute(cli));
}
