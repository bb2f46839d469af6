use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use metallic_cli::config::parse_config;
use metallic_cli::run::{render, run_config, Format, RunOptions};
use metallic_cli::{catalog, ConfigError};

/// Numerical verifier for metallic structures, almost quadratic
/// φ-structures, warped-product Kenmotsu manifolds, and quadratic
/// φ-hypersurfaces.
#[derive(Parser)]
#[command(name = "metallic", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Number of sample points per check (default 100).
    #[arg(long, global = true)]
    samples: Option<usize>,

    /// Seed of the deterministic sampling sequence (default 42).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Absolute residual tolerance (default 1e-9).
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Report format: text or json (default text).
    #[arg(long, global = true)]
    format: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks requested by a JSON config file.
    Verify { path: PathBuf },
    /// Work with the built-in example catalog.
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
}

#[derive(Subcommand)]
enum ExamplesAction {
    /// List the bundled examples.
    List,
    /// Run a bundled example by name.
    Run { name: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match cli.format.as_deref().map(Format::from_name).transpose() {
        Ok(f) => f,
        Err(e) => return config_failure(e),
    };
    let options = RunOptions {
        samples: cli.samples,
        seed: cli.seed,
        tol: cli.tol,
        format,
    };

    let config = match &cli.command {
        Command::Verify { path } => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    return config_failure(ConfigError(format!(
                        "cannot read `{}`: {e}",
                        path.display()
                    )))
                }
            };
            match parse_config(&text) {
                Ok(c) => c,
                Err(e) => return config_failure(e),
            }
        }
        Command::Examples { action } => match action {
            ExamplesAction::List => {
                print!("{}", catalog::listing());
                return ExitCode::SUCCESS;
            }
            ExamplesAction::Run { name } => match catalog::lookup(name) {
                Ok(c) => c,
                Err(e) => return config_failure(e),
            },
        },
    };

    match run_config(&config, &options) {
        Ok((report, format)) => {
            print!("{}", render(&report, format));
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => config_failure(e),
    }
}

fn config_failure(e: ConfigError) -> ExitCode {
    eprintln!("{e}");
    ExitCode::from(2)
}
