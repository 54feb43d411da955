mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::Failure;

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("FRUSTRA_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("FRUSTRA_THREADS must be a positive integer, got {v:?}")))?;
    if n == 0 {
        return Err(Failure::Usage("FRUSTRA_THREADS must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Runtime(e.to_string()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Spectrum { l, gamma, delta, field, out } => commands::spectrum(l, gamma, delta, &field, &out),
        Command::Verify { l, gamma, delta, field, out } => commands::verify(&l, &gamma, &delta, &field, &out),
        Command::PhaseDiagram { l, gamma, delta, field, engine, out } => {
            commands::phase_diagram(l, gamma, &delta, &field, engine, &out)
        }
        Command::Winding { gamma, delta, field, n_grid, out } => {
            commands::winding(gamma, delta, &field, n_grid, &out)
        }
        Command::Bloch { gamma, delta, h, samples, out } => commands::bloch(gamma, delta, h, samples, &out),
        Command::GapScan { l, gamma, delta, h, out } => commands::gap_scan(&l, gamma, delta, h, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("frustra: {}", f.message());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
