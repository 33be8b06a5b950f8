use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use covertlink::experiments::{preset, run_experiment, ExperimentConfig};
use covertlink::Result;

/// Covert uplink experiments. Exit status: 0 when every audit passed,
/// 2 when an audit failed, 1 on errors.
#[derive(Parser)]
#[command(name = "covertlink", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset or a configuration file and write CSV plus JSON metadata.
    Run {
        #[arg(long, conflicts_with = "config")]
        preset: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, required_unless_present = "echo_config")]
        out: Option<PathBuf>,
        /// Base seed for channel draws, placements and Monte Carlo.
        #[arg(long)]
        seed: Option<u64>,
        /// `key=value` override of a configuration field (repeatable).
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
        #[arg(long)]
        desk_scale: bool,
        /// Print the resolved configuration and exit.
        #[arg(long)]
        echo_config: bool,
    },
    /// Check a configuration file and list every problem found.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn load(path: &PathBuf) -> Result<ExperimentConfig> {
    ExperimentConfig::from_json(&std::fs::read_to_string(path)?)
}

fn execute(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Validate { config } => {
            let cfg = load(&config)?;
            cfg.validate()?;
            println!("{}: ok ({} sweep points)", config.display(), cfg.points()?.len());
            Ok(ExitCode::SUCCESS)
        }
        Command::Run {
            preset: name,
            config,
            out,
            seed,
            sets,
            desk_scale,
            echo_config,
        } => {
            let mut cfg = match (&name, &config) {
                (Some(n), _) => preset(n, desk_scale)?,
                (None, Some(p)) => {
                    let mut c = load(p)?;
                    if desk_scale {
                        c.desk_scale();
                    }
                    c
                }
                (None, None) => ExperimentConfig::default(),
            };
            if let Some(s) = seed {
                cfg.seed = s;
                cfg.mc.seed = s;
            }
            cfg.apply_overrides(&sets)?;
            if echo_config {
                // A closed pipe (e.g. `| head`) is not an error.
                let _ = writeln!(std::io::stdout(), "{}", cfg.to_json()?);
                return Ok(ExitCode::SUCCESS);
            }
            let out_dir = out.expect("clap enforces --out");
            let result = run_experiment(&cfg)?;
            let (csv, json) = result.write(&out_dir)?;
            eprintln!(
                "{}: {} rows in {:.1} s -> {}, {}",
                result.meta.name,
                result.meta.rows,
                result.meta.wall_time_s,
                csv.display(),
                json.display()
            );
            for e in &result.meta.errors {
                eprintln!("  {e}");
            }
            Ok(if result.all_audits_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
