//! `blockamp` — runs the block-encoded amplification experiments.
//!
//! Exit codes: 0 success, 2 config/usage error, 3 oracle mismatch,
//! 4 numerical failure inside a run.

use std::fs;
use std::process::ExitCode;

use blockamp_core::harness::{
    self, Encoder, ExperimentConfig, ExperimentName, HarnessError, PartialConfig,
};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "blockamp", version, about = "block-encoding amplification experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named experiment and write its CSV output.
    Run {
        /// Experiment name (see `list`).
        experiment: String,
        /// JSON config file; must name the same experiment.
        #[arg(long)]
        config: String,
        /// CSV output path (overrides the config's output_path).
        #[arg(long)]
        out: Option<String>,
        /// RNG seed (overrides the config's seed).
        #[arg(long)]
        seed: Option<u64>,
        /// Block encoder (overrides the config's encoder).
        #[arg(long)]
        encoder: Option<String>,
    },
    /// List the experiment registry.
    List,
    /// Recompute classical references independently and compare.
    OracleCheck {
        /// JSON config file.
        #[arg(long)]
        config: String,
    },
}

fn load_config(
    path: &str,
    expect: Option<&str>,
    seed: Option<u64>,
    encoder: Option<&str>,
    out: Option<String>,
) -> Result<ExperimentConfig, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
    let partial: PartialConfig =
        serde_json_from(&text).map_err(|e| format!("bad config {path}: {e}"))?;
    if let Some(name) = expect {
        if partial.experiment != name {
            return Err(format!(
                "config names experiment '{}' but '{}' was requested",
                partial.experiment, name
            ));
        }
    }
    let mut cfg = ExperimentConfig::from_partial(partial).map_err(|e| e.to_string())?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(enc) = encoder {
        cfg.encoder = Encoder::parse(enc).map_err(|e| e.to_string())?;
    }
    if out.is_some() {
        cfg.output_path = out;
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn serde_json_from(text: &str) -> Result<PartialConfig, HarnessError> {
    ExperimentConfig::parse_partial(text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for e in ExperimentName::ALL {
                println!("{:<18} {}", e.label(), e.description());
            }
            ExitCode::SUCCESS
        }
        Command::Run {
            experiment,
            config,
            out,
            seed,
            encoder,
        } => {
            let cfg = match load_config(
                &config,
                Some(&experiment),
                seed,
                encoder.as_deref(),
                out,
            ) {
                Ok(c) => c,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    return ExitCode::from(2);
                }
            };
            match harness::run(&cfg) {
                Ok(output) => {
                    if let Some(path) = &cfg.output_path {
                        if let Err(e) = fs::write(path, &output.csv) {
                            eprintln!("error: cannot write {path}: {e}");
                            return ExitCode::from(2);
                        }
                        println!("wrote {} ({} rows)", path, output.rows.len());
                    } else {
                        print!("{}", output.csv);
                    }
                    eprint!("{}", output.summary);
                    ExitCode::SUCCESS
                }
                Err(HarnessError::Config(msg)) => {
                    eprintln!("error: {msg}");
                    ExitCode::from(2)
                }
                Err(e) => {
                    eprintln!("numerical failure: {e}");
                    ExitCode::from(4)
                }
            }
        }
        Command::OracleCheck { config } => {
            let cfg = match load_config(&config, None, None, None, None) {
                Ok(c) => c,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    return ExitCode::from(2);
                }
            };
            match harness::compare_oracle(&cfg) {
                Ok(report) => {
                    for line in &report.lines {
                        println!(
                            "{} {} (deviation {:.3e})",
                            if line.passed { "ok  " } else { "FAIL" },
                            line.label,
                            line.deviation
                        );
                    }
                    if report.all_passed() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(3)
                    }
                }
                Err(HarnessError::Config(msg)) => {
                    eprintln!("error: {msg}");
                    ExitCode::from(2)
                }
                Err(e) => {
                    eprintln!("numerical failure: {e}");
                    ExitCode::from(4)
                }
            }
        }
    }
}
