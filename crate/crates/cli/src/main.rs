mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Command, Flags};

/// Constructs, verifies and cross-checks solutions of 1D transport
/// problems with nearly incompressible velocity fields.
#[derive(Debug, Parser)]
#[command(name = "transport1d", version)]
struct Cli {
    /// Builtin labels or field CSV paths, comma separated.
    #[arg(long, global = true)]
    scenario: Option<String>,
    /// Time levels (default 257, or the table grid of a CSV scenario).
    #[arg(long, global = true)]
    nt: Option<usize>,
    /// Spatial nodes.
    #[arg(long, global = true)]
    nx: Option<usize>,
    /// Mollifier indices: a comma list, or one `N` for `N/4,N/2,N`.
    #[arg(long = "mollifier-n", global = true)]
    mollifier_n: Option<String>,
    /// Output directory.
    #[arg(long, global = true, env = "TRANSPORT1D_OUT")]
    out: Option<PathBuf>,
    /// Criteria to run, e.g. `ENV-*` or `SOL-BC,SOL-CMP`.
    #[arg(long, global = true)]
    only: Option<String>,
    /// Worker threads for the solver.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Overwrite existing output files.
    #[arg(long, global = true)]
    force: bool,
    /// Abscissa for `traces`.
    #[arg(long, global = true, allow_negative_numbers = true)]
    x: Option<f64>,
    /// TOML config file; flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Solve and write solution, boundary traces and a JSON summary.
    Run,
    /// Run the acceptance criteria and print a pass/fail table.
    Verify,
    /// Compare with the mollified smooth-transport solutions.
    Compare,
    /// Write the interior traces at `--x`.
    Traces,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::Run => Command::Run,
        Cmd::Verify => Command::Verify,
        Cmd::Compare => Command::Compare,
        Cmd::Traces => Command::Traces,
    };
    let flags = Flags {
        scenario: cli.scenario,
        nt: cli.nt,
        nx: cli.nx,
        mollifier_n: cli.mollifier_n,
        out: cli.out,
        only: cli.only,
        jobs: cli.jobs,
        force: cli.force,
        x: cli.x,
    };
    let file = match cli.config.as_deref().map(config::read_file).transpose() {
        Ok(f) => f.unwrap_or_default(),
        Err(e) => return fail(&e),
    };
    let cfg = match config::resolve(command, file, flags) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    match commands::execute(&cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => fail(&e),
    }
}

fn fail(e: &anyhow::Error) -> ExitCode {
    eprintln!("error: {e:#}");
    ExitCode::from(commands::exit_code(e))
}
