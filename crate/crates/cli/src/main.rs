use std::process::ExitCode;

use clap::Parser;
use riemann_cli::{run, Cli, CliError};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(written) => {
            for path in written {
                println!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Solver { state, .. } = &e {
                eprintln!(
                    "{}",
                    serde_json::to_string_pretty(state).unwrap_or_default()
                );
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
