use clap::Parser;

fn main() {
    let cli = autodecompose::Cli::parse();
    if let Err(e) = autodecompose::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
