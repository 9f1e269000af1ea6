use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use majorize_cli::{compare_runs, run_experiment, CliError, ExperimentConfig};

/// Run majorization solvers on experiment configs.
///
/// Trace files go to each config's `output.trace_path`; set
/// MAJORIZE_OUTPUT_DIR to collect them in one directory instead.
#[derive(Parser)]
#[command(name = "majorize", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and print its summary as a JSON line.
    Run { config: PathBuf },
    /// Run several experiments on the same instance and print a merged CSV table.
    Compare {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
    },
    /// Check a config without running it.
    Validate { config: PathBuf },
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config } => {
            let cfg = match ExperimentConfig::load(&config) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            match run_experiment(&cfg) {
                Ok(summary) => {
                    println!("{}", serde_json::to_string(&summary).expect("summary serializes"));
                    ExitCode::from(summary.exit_code() as u8)
                }
                Err(e) => fail(e),
            }
        }
        Command::Compare { configs } => {
            let cfgs = match configs.iter().map(|p| ExperimentConfig::load(p)).collect::<Result<Vec<_>, _>>() {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            match compare_runs(&cfgs) {
                Ok(cmp) => {
                    print!("{}", cmp.to_csv());
                    for s in &cmp.summaries {
                        eprintln!("{}", serde_json::to_string(s).expect("summary serializes"));
                    }
                    let code = cmp.summaries.iter().map(|s| s.exit_code()).max().unwrap_or(0);
                    ExitCode::from(code as u8)
                }
                Err(e) => fail(e),
            }
        }
        Command::Validate { config } => match ExperimentConfig::load(&config) {
            Ok(cfg) => match cfg.problem.build() {
                Ok(_) => {
                    println!("ok");
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            },
            Err(e) => fail(e),
        },
    }
}
