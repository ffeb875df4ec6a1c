mod analyze;
mod args;
mod output;
mod simulate;
mod verify;

use std::io::IsTerminal;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

use args::{resolve, Cli, Command};

/// Exit status: 1 verification failure, 2 usage or config error, 3 solver
/// or runtime error.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Solver(String),
    Io(String),
}

impl CliError {
    fn config(e: impl std::fmt::Display) -> Self {
        CliError::Config(e.to_string())
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) | CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Solver(m) => write!(f, "solver error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

const SIMULATE_ARRIVALS: u64 = 50;
const VERIFY_ARRIVALS: u64 = 200_000;
const VERIFY_REPLICATIONS: usize = 5;

fn use_color() -> bool {
    std::env::var_os("NO_COLOR").is_none() && std::io::stdout().is_terminal()
}

fn dispatch(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Analyze(a) => {
            let run = resolve(&a, SIMULATE_ARRIVALS, 1)?;
            let analysis = analyze::analyze(&run.network)?;
            print!("{}", analyze::render(&analysis));
            if let Some(dir) = &run.out_dir {
                let mut out = output::OutDir::create(dir)?;
                out.json("analysis.json", &analysis)?;
                out.finish("analyze", &run)?;
            }
            Ok(true)
        }
        Command::Simulate(a) => {
            let run = resolve(&a, SIMULATE_ARRIVALS, 1)?;
            print!("{}", simulate::simulate(&run)?);
            Ok(true)
        }
        Command::Verify(v) => {
            let run = resolve(&v.run, VERIFY_ARRIVALS, VERIFY_REPLICATIONS)?;
            let report = verify::verify(&run, v.theory_scale)?;
            print!("{}", verify::render(&report, use_color()));
            verify::write(&report, &run)?;
            Ok(report.pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("aoi-line: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
