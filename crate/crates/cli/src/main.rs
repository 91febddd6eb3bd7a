use clap::{Args, Parser, Subcommand};
use contract_synth_cli::commands::{
    analyze, demo_command, load_config, render_outcome, synthesize_command, verify_command, Overrides,
};
use contract_synth_cli::config::ObjectiveSpec;
use contract_synth_cli::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "contract-synth", version, about = "Contract-based safety controller synthesis for linear systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Output directory for artifacts.
    #[arg(long, env = "CONTRACT_SYNTH_OUT")]
    out: Option<PathBuf>,
    /// Membership tolerance of the verification.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Verification grid points per segment.
    #[arg(long)]
    grid: Option<usize>,
    /// LP objective.
    #[arg(long, value_enum)]
    objective: Option<ObjectiveSpec>,
}

impl RunArgs {
    fn overrides(self) -> Overrides {
        Overrides {
            out: self.out,
            tolerance: self.tolerance,
            grid: self.grid,
            objective: self.objective,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Smoothness radius, minimum number of samples and breakpoint diagnostics.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Synthesize, certify and write artifacts.
    Synthesize {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Re-certify saved artifacts.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Directory written by `synthesize`.
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Planar robot example.
    Demo {
        #[command(flatten)]
        run: RunArgs,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze { config, json } => {
            let a = analyze(&load_config(&config)?)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&a).map_err(|e| CliError::Io(e.to_string()))?);
            } else {
                print!("{}", a.render());
            }
        }
        Command::Synthesize { config, run } => {
            let outcome = synthesize_command(&load_config(&config)?, &run.overrides())?;
            print!("{}", render_outcome(&outcome));
        }
        Command::Verify {
            config,
            results,
            tolerance,
            grid,
        } => {
            let overrides = Overrides {
                tolerance,
                grid,
                ..Overrides::default()
            };
            let outcome = verify_command(&load_config(&config)?, &results, &overrides)?;
            println!("{}", serde_json::to_string_pretty(&outcome).map_err(|e| CliError::Io(e.to_string()))?);
            if !outcome.verdict() {
                let mut why = outcome.issues.join("; ");
                if !outcome.verification.implements {
                    if !why.is_empty() {
                        why.push_str("; ");
                    }
                    why.push_str("contract not implemented");
                }
                return Err(CliError::VerificationFailed(why));
            }
        }
        Command::Demo { run } => {
            let outcome = demo_command(&run.overrides())?;
            print!("{}", render_outcome(&outcome));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.kind());
            ExitCode::from(e.exit_code())
        }
    }
}
