mod config;
mod render;
mod run;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use clap::Parser;

use config::{Cli, Command};
use run::{emit, load_replay, CliError, CliResult};

fn resolve(cli: Cli) -> CliResult<Command> {
    let mut cmd = match cli.command {
        Command::Replay(args) => load_replay(&args)?,
        other => other,
    };
    if let Some(common) = cmd.common_mut() {
        if common.workers == 0 {
            common.workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(common.workers)
            .build_global()
            .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    Ok(cmd)
}

fn execute(cli: Cli) -> CliResult<()> {
    let mut cmd = resolve(cli)?;
    let text = run::run(&cmd)?;
    let out = cmd.common_mut().and_then(|c| c.output.clone());
    emit(out.as_deref(), &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = catch_unwind(AssertUnwindSafe(|| execute(cli)))
        .unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".to_string());
            Err(CliError::Internal(msg))
        });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            println!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
