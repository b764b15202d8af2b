use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

mod config;
mod report;
mod run;

use config::{Kind, ScenarioConfig};
use report::RunReport;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
    #[error(transparent)]
    Numerical(#[from] specbound_core::Error),
}

#[derive(Parser)]
#[command(
    name = "specbound",
    version,
    about = "Spectral threshold and virial scenarios"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file and write its report.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Record wall time in the report. Output is then no longer byte-reproducible.
        #[arg(long)]
        timing: bool,
    },
    /// Print every scenario kind with the result it exercises and its parameters.
    ListScenarios,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn list_scenarios() {
    for kind in Kind::ALL {
        println!("{kind}: {}", kind.anchor());
        for (key, doc) in kind.schema() {
            println!("    {key}: {doc}");
        }
    }
}

#[cfg(feature = "parallel")]
fn set_threads(threads: Option<usize>) -> Result<(), CliError> {
    if let Some(k) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot start {k} threads: {e}")))?;
    }
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn set_threads(threads: Option<usize>) -> Result<(), CliError> {
    if threads.is_some_and(|k| k > 1) {
        eprintln!("warning: built without the `parallel` feature, running on one thread");
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::ListScenarios => {
            list_scenarios();
            Ok(true)
        }
        Command::Run {
            config,
            out,
            format,
            threads,
            seed,
            timing,
        } => {
            set_threads(threads)?;
            let scenario = ScenarioConfig::load(&config)?;
            let start = Instant::now();
            let outcome = run::run(&scenario)?;
            let elapsed = timing.then(|| start.elapsed().as_secs_f64());
            let report = RunReport::new(scenario, outcome, seed, elapsed);
            let text = match format {
                Format::Json => report.to_json(),
                Format::Csv => report.to_csv(),
            };
            std::fs::write(&out, text)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", out.display())))?;
            for v in &report.verdicts {
                eprintln!("{} {}", if v.pass { "PASS" } else { "FAIL" }, v.name);
            }
            Ok(report.passed)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
