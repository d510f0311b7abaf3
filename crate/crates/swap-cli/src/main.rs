use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use swap_cli::{describe, run_experiment, CliError, ExperimentConfig};

/// Cohort-selection experiment harness: sweep (s, j) grids of strong/weak
/// pull parameters with paired seeds and emit result tables and plots.
#[derive(Parser)]
#[command(name = "swap", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured experiment and write CSVs, manifest, and plots.
    Run {
        /// JSON experiment config.
        #[arg(long)]
        config: PathBuf,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for trial execution (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Override the config's run cost cap.
        #[arg(long)]
        budget_cap: Option<f64>,
    },
    /// Print the difficulty report and theoretical bounds for the
    /// configured instance.
    Describe {
        /// JSON experiment config.
        #[arg(long)]
        config: PathBuf,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            config,
            seed,
            out,
            threads,
            budget_cap,
        } => {
            if let Some(threads) = threads {
                if threads == 0 {
                    return Err(CliError::Config("--threads must be >= 1".into()));
                }
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global()
                    .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
            }
            let config = ExperimentConfig::from_path(&config)?.with_overrides(seed, out, budget_cap);
            config.validate()?;
            let output = run_experiment(&config)?;
            println!(
                "wrote {} cell(s), {} hardness row(s), {} zone cell(s) to {}",
                output.cells.len(),
                output.hardness.len(),
                output.zone.len(),
                output.out_dir.display()
            );
            for file in &output.files {
                println!("  {}", output.out_dir.join(file).display());
            }
            Ok(())
        }
        Command::Describe { config, seed } => {
            let config = ExperimentConfig::from_path(&config)?.with_overrides(seed, None, None);
            print!("{}", describe(&config)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
