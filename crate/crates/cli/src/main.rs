use std::process::ExitCode;
use std::sync::Arc;

use clap::Parser;
use dubrovin_cli::args::Command;
use dubrovin_cli::{run, service, Cli, CliError};
use dubrovin_core::engine::Engine;

fn port(flag: u16) -> Result<u16, CliError> {
    match std::env::var("DUBROVIN_PORT") {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Usage {
            flag: "DUBROVIN_PORT",
            message: format!("{v:?} is not a port number"),
        }),
        Err(_) => Ok(flag),
    }
}

fn serve(cli: &Cli, flag: u16) -> Result<(), CliError> {
    let port = port(flag)?;
    let engine = Arc::new(Engine::new(cli.max_degree)?);
    let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Io(e.to_string()))?;
    rt.block_on(service::serve(engine, port))
        .map_err(|e| CliError::Io(format!("port {port}: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Serve(a) => serve(&cli, a.port).map(|_| String::new()),
        _ => run(&cli),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
