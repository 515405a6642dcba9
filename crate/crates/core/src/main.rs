use std::process::ExitCode;

use clap::Parser;
use wigner_frames::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    // WIGNER_THREADS caps the worker pool; results do not depend on it
    if let Ok(v) = std::env::var("WIGNER_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("error: cannot size the thread pool: {e}");
                    return ExitCode::from(1);
                }
            }
            _ => {
                eprintln!("error: WIGNER_THREADS must be a positive integer, got {v:?}");
                return ExitCode::from(2);
            }
        }
    }
    ExitCode::from(run(cli))
}
