use clap::Parser;

fn main() {
    let args = cellcap_cli::Args::parse();
    if let Err(e) = cellcap_cli::run(&args) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
