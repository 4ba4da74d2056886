use std::io::{self, IsTerminal};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use interactors::repl::{repl, run_batch, SessionConfig};

/// Query a Horn-clause program whose engines are first-class values.
#[derive(Parser)]
#[command(version)]
struct Cli {
    /// Load a program file after the prelude (repeatable)
    #[arg(long, value_name = "FILE")]
    consult: Vec<PathBuf>,
    /// Run one goal, print its answers and exit
    #[arg(long, value_name = "GOAL")]
    goal: Option<String>,
    /// Stop after this many answers
    #[arg(long, value_name = "N")]
    limit: Option<usize>,
    /// Print every engine event on standard error
    #[arg(long)]
    trace: bool,
    /// Write the prelude sources into DIR and exit
    #[arg(long, value_name = "DIR")]
    extract_prelude: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(dir) = &cli.extract_prelude {
        return match interactors::prelude::extract(dir) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("{}: {e}", dir.display());
                ExitCode::from(2)
            }
        };
    }
    let config = SessionConfig {
        files: cli.consult,
        batch_goal: cli.goal,
        answer_limit: cli.limit,
        trace: cli.trace,
    };
    // deep object-level recursion nests engines on the host stack
    let worker = std::thread::Builder::new().stack_size(1 << 30).spawn(move || {
        let (mut out, mut err) = (io::stdout().lock(), io::stderr().lock());
        if config.batch_goal.is_some() {
            run_batch(&config, &mut out, &mut err)
        } else {
            if io::stdin().is_terminal() {
                eprintln!("interactors: enter a query ending in '.', ';' for more answers, end of input to quit");
            }
            repl(&config, &mut io::stdin().lock(), &mut out, &mut err)
        }
    });
    let code = worker.map(|h| h.join().unwrap_or(2)).unwrap_or(2);
    ExitCode::from(code as u8)
}
