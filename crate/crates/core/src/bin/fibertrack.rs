use clap::Parser;
use fibertrack::cli::{run, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("fibertrack: error: {e}");
        std::process::exit(1);
    }
}
