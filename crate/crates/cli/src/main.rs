mod args;
mod commands;
mod io;

use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use clap::Parser;

use crate::args::Cli;
use crate::commands::{dispatch, Context};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cancel = Arc::new(AtomicBool::new(false));
    {
        let flag = cancel.clone();
        // Best effort: a second handler registration only fails under test harnesses.
        let _ = ctrlc::set_handler(move || flag.store(true, Ordering::Relaxed));
    }
    let outcome = std::panic::catch_unwind(|| Context::new(cli.global, cancel).and_then(|ctx| dispatch(&ctx, cli.command)));
    match outcome {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("heatcomp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(_) => ExitCode::from(1),
    }
}
