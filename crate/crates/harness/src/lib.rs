//! Config-driven experiments for partially irrational learning on the grid
//! coverage game: presets, multi-seed runs with CSV traces and key-value
//! summaries, arm comparison, and the toy-game certification suite.

pub mod certify;
pub mod config;
pub mod error;
pub mod presets;
pub mod run;
pub mod summary;

pub use config::{
    emit, load_config, parse_config, parse_config_in, AlgorithmChoice, ExperimentConfig, Prepared,
};
pub use error::{HarnessError, Result};
pub use run::{analyze, run_experiment, OptimumTable, RunReport};
pub use summary::{aggregate, Arm, Comparison, SeedSummary};
