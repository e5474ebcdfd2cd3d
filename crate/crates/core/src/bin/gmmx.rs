use clap::Parser;

use gmm_expansion::cli::{exit_code, run, Cli};
use gmm_expansion::Error;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        // a closed downstream pipe (`gmmx ... | head`) is not a failure
        if matches!(&e, Error::Io(io) if io.kind() == std::io::ErrorKind::BrokenPipe) {
            return;
        }
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}
