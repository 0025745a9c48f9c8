use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gqlab::error::GqError;
use gqlab::experiment::{self, SeedOutcome};

#[derive(Parser)]
#[command(name = "gqlab", about = "Deterministic GQ(lambda) experiments on finite MDPs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every seed in a config and write curve/summary files.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override output.dir from the config.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Override run.seeds with a comma-separated list.
        #[arg(long)]
        seeds: Option<String>,
        #[arg(long)]
        quiet: bool,
    },
    /// Print the DP oracle's Q table for a config.
    Oracle {
        #[arg(long)]
        config: PathBuf,
    },
    /// Check a config without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn load_spec(path: &PathBuf) -> Result<experiment::ExperimentSpec, GqError> {
    let text = std::fs::read_to_string(path).map_err(|source| GqError::Io {
        path: path.display().to_string(),
        source,
    })?;
    experiment::parse_config(&text)
}

fn is_validation_error(e: &GqError) -> bool {
    matches!(
        e,
        GqError::Config { .. } | GqError::InvalidModel(_) | GqError::InvalidParameter { .. }
    )
}

fn exit_for(e: &GqError) -> ExitCode {
    if is_validation_error(e) {
        ExitCode::from(1)
    } else {
        ExitCode::from(2)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, output, seeds, quiet } => {
            let mut spec = match load_spec(&config) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return exit_for(&e);
                }
            };
            if let Some(dir) = output {
                spec.output_dir = dir;
            }
            if let Some(list) = seeds {
                let parsed: Result<Vec<u64>, _> =
                    list.split(',').map(|v| v.trim().parse()).collect();
                match parsed {
                    Ok(s) if !s.is_empty() => spec.seeds = s,
                    _ => {
                        eprintln!("error: --seeds must be a comma-separated list of integers");
                        return ExitCode::from(1);
                    }
                }
            }
            match experiment::run_experiment(&spec) {
                Ok(summary) => {
                    if !quiet {
                        for r in &summary.results {
                            let status = match &r.outcome {
                                SeedOutcome::Ok => "ok".to_string(),
                                SeedOutcome::Diverged { step } => format!("diverged at step {step}"),
                                SeedOutcome::Failed { message } => format!("failed ({message})"),
                            };
                            match r.final_rmse {
                                Some(rmse) => println!("seed {}: {status}, final rmse {rmse:.6}", r.seed),
                                None => println!("seed {}: {status}", r.seed),
                            }
                        }
                        if let Some(mean) = summary.mean_final_rmse {
                            println!("mean final rmse: {mean:.6}");
                        }
                        println!("wrote {}", summary.output_dir.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    exit_for(&e)
                }
            }
        }
        Command::Oracle { config } => match load_spec(&config).and_then(|s| experiment::render_oracle(&s)) {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                exit_for(&e)
            }
        },
        Command::Validate { config } => match load_spec(&config) {
            Ok(_) => {
                println!("ok");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                exit_for(&e)
            }
        },
    }
}
