use clap::Parser;

fn main() {
    let cli = sturm_bounds::cli::Cli::parse();
    std::process::exit(sturm_bounds::cli::main_with(cli));
}
