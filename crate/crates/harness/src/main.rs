use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pipip_harness::certify::certify;
use pipip_harness::config::{emit, load_config, AlgorithmChoice, ExperimentConfig};
use pipip_harness::run::{run_experiment, write_comparison};
use pipip_harness::summary::aggregate;
use pipip_harness::{analyze, presets, Result};

#[derive(Parser)]
#[command(
    name = "pipip",
    version,
    about = "Partially irrational learning on grid coverage games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a config (or a preset name) for one or more algorithms.
    Run {
        /// Config file, or `experiment1`, `experiment1-eps03`, `experiment2`.
        config: String,
        /// Use seeds 0..N instead of the configured list.
        #[arg(long)]
        seeds: Option<u64>,
        #[arg(long)]
        horizon: Option<u64>,
        /// Comma-separated list, e.g. `phpip,disl`.
        #[arg(long, value_delimiter = ',')]
        algorithm: Vec<AlgorithmChoice>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Compare the arms stored under a run directory.
    Analyze { dir: PathBuf },
    /// Certify the chain analysis on the built-in toy games.
    Verify {
        /// Also write resistance graphs and stationary distributions as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the built-in experiment configs.
    Presets {
        /// Target directory; prints to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn resolve(config: &str) -> Result<ExperimentConfig> {
    match presets::by_name(config) {
        Some(c) => Ok(c),
        None => load_config(config.as_ref()),
    }
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run {
            config,
            seeds,
            horizon,
            algorithm,
            out,
            threads,
        } => {
            let mut base = resolve(&config)?;
            if let Some(n) = seeds {
                base = base.with_seed_count(n);
            }
            if let Some(h) = horizon {
                base.run.horizon = h;
            }
            if let Some(dir) = out {
                base.run.output = dir;
            }
            let algorithms = if algorithm.is_empty() {
                vec![base.learning.algorithm]
            } else {
                algorithm
            };
            let mut arms = Vec::new();
            for alg in algorithms {
                let config = base.with_algorithm(alg);
                let report = run_experiment(&config, threads)?;
                eprintln!(
                    "{}: {} seeds in {:.1} s -> {}",
                    alg,
                    report.seeds.len(),
                    report.wall_clock_ms / 1e3,
                    report.directory.display()
                );
                arms.push(report.arm());
            }
            let comparison = aggregate(&arms)?;
            write_comparison(&base.run.output, &comparison)?;
            print!("{comparison}");
            Ok(true)
        }
        Command::Analyze { dir } => {
            print!("{}", analyze(&dir)?);
            Ok(true)
        }
        Command::Verify { out } => {
            let report = certify(out.as_deref())?;
            print!("{report}");
            Ok(report.passed())
        }
        Command::Presets { out } => {
            for (name, config) in presets::all() {
                let text = emit(&config)?;
                match &out {
                    Some(dir) => {
                        std::fs::create_dir_all(dir).map_err(|e| {
                            pipip_harness::HarnessError::Io {
                                path: dir.clone(),
                                source: e,
                            }
                        })?;
                        let path = dir.join(format!("{name}.toml"));
                        std::fs::write(&path, text).map_err(|e| {
                            pipip_harness::HarnessError::Io {
                                path: path.clone(),
                                source: e,
                            }
                        })?;
                        println!("{}", path.display());
                    }
                    None => println!("# {name}\n{text}"),
                }
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
