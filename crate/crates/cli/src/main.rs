//! `coreset`: build, evaluate and benchmark layered group sampling coresets.
//!
//! Exit codes: 0 on success, 2 for usage and input errors, 3 for internal
//! failures.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let text = e.to_string();
            eprintln!("{}", text.lines().next().unwrap_or("error: invalid arguments"));
            return ExitCode::from(2);
        }
        // --help and --version.
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(3);
        }
    }
    let outcome = std::panic::catch_unwind(|| match cli.command {
        Command::Build(a) => commands::build(&a),
        Command::Evaluate(a) => commands::evaluate(&a),
        Command::Bench(a) => commands::bench(&a),
        Command::VcEstimate(a) => commands::vc_estimate(&a),
    });
    match outcome {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {}", one_line(&e));
            ExitCode::from(exit_code(&e))
        }
        // The panic hook has already printed the message.
        Err(_) => ExitCode::from(3),
    }
}

fn one_line(e: &anyhow::Error) -> String {
    format!("{e:#}").replace('\n', " ")
}

/// Input, validation and file errors are the caller's to fix; anything else
/// is internal.
fn exit_code(e: &anyhow::Error) -> u8 {
    let input = e.chain().any(|c| {
        c.is::<coreset_core::CoresetError>()
            || c.is::<std::io::Error>()
            || c.is::<serde_json::Error>()
            || c.is::<commands::InputError>()
    });
    if input {
        2
    } else {
        3
    }
}
