use clap::Parser;

use sigwaste::cli::{run, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            std::process::exit(e.exit_code());
        }
    };
    if let Err(f) = run(&cli) {
        eprintln!("sigwaste: {}", f.message());
        std::process::exit(f.exit_code());
    }
}
