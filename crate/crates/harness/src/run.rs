//! Multi-seed runs and their files.
//!
//! A run of one algorithm writes into `<output>/<algorithm>/`:
//!
//! - `config.toml`, the resolved config;
//! - `seed-<s>.csv`, one row per decision with columns
//!   `step,epsilon,a_0..a_{n-1},u_0..u_{n-1},phi`, where `a_i` is the action
//!   index (rank of the agent's cell among non-obstacle cells);
//! - `seed-<s>.summary`, see [`crate::summary`].
//!
//! Numbers are written with Rust's shortest round-trip formatting, so a
//! trace file is a pure function of the config and the seed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use pipip_core::coverage::{CoverageGame, MOVING_SETTLE_TIME, MOVING_START_TIME};
use pipip_core::learning::{run_episode, Environment, EpisodeTrace};
use pipip_core::{ActionId, AgentId, JointAction};
use rayon::prelude::*;

use crate::config::{emit, load_config, ExperimentConfig, Prepared};
use crate::error::{HarnessError, Result};
use crate::summary::{aggregate, median, Arm, Comparison, SeedSummary, SUCCESS_FRACTION};

/// Tracking ratios are collected after this step.
pub const TRACKING_START: u64 = 100;
/// A step counts as optimal when `φ` is this close to the optimum.
pub const OPTIMAL_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OptimumMethod {
    Exact,
    Greedy,
}

impl OptimumMethod {
    pub fn name(self) -> &'static str {
        match self {
            OptimumMethod::Exact => "exact",
            OptimumMethod::Greedy => "greedy",
        }
    }
}

/// `max_a φ_t(a)` for every `t` an episode can visit.
#[derive(Clone, Debug)]
pub struct OptimumTable {
    /// Values at `start..start + values.len()`; the first value also
    /// covers earlier steps and the last one later steps.
    start: u64,
    values: Vec<f64>,
    method: OptimumMethod,
}

impl OptimumTable {
    /// Exact when the placement count is within the enumeration guard,
    /// greedy with best-response polishing otherwise.
    pub fn build(game: &CoverageGame, horizon: u64) -> OptimumTable {
        let times: Vec<u64> = if game.world().density().is_time_varying() {
            (MOVING_START_TIME..=MOVING_SETTLE_TIME.min(horizon.max(MOVING_START_TIME))).collect()
        } else {
            vec![0]
        };
        let exact = game.exact_optimum(times[0]).is_ok();
        let values = times
            .par_iter()
            .map(|&t| match exact {
                true => game
                    .exact_optimum(t)
                    .map(|(v, _)| v)
                    .expect("guard checked"),
                false => game.greedy_optimum(t).0,
            })
            .collect();
        OptimumTable {
            start: times[0],
            values,
            method: if exact {
                OptimumMethod::Exact
            } else {
                OptimumMethod::Greedy
            },
        }
    }

    pub fn at(&self, t: u64) -> f64 {
        let k = t
            .saturating_sub(self.start)
            .min(self.values.len() as u64 - 1);
        self.values[k as usize]
    }

    pub fn method(&self) -> OptimumMethod {
        self.method
    }
}

/// `φ / optimum`, with a zero optimum counting as fully tracked.
fn ratio(phi: f64, optimum: f64) -> f64 {
    if optimum > 0.0 {
        phi / optimum
    } else {
        1.0
    }
}

#[derive(Clone, Debug)]
pub struct SeedRun {
    pub summary: SeedSummary,
    /// `φ(a(t)) / max_a φ_t(a)` for `t > TRACKING_START`.
    pub tracking: Vec<f64>,
    pub trace_path: PathBuf,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub directory: PathBuf,
    pub seeds: Vec<SeedRun>,
    pub wall_clock_ms: f64,
}

impl RunReport {
    pub fn arm(&self) -> Arm {
        Arm {
            config: self.config.clone(),
            summaries: self.seeds.iter().map(|s| s.summary.clone()).collect(),
        }
    }

    /// Median tracking ratio pooled over all seeds and steps.
    pub fn pooled_tracking_median(&self) -> Option<f64> {
        let all: Vec<f64> = self
            .seeds
            .iter()
            .flat_map(|s| s.tracking.iter().copied())
            .collect();
        median(&all)
    }
}

pub fn arm_directory(config: &ExperimentConfig) -> PathBuf {
    config.run.output.join(config.learning.algorithm.name())
}

/// Runs every seed of `config` on a pool of `threads` workers (all cores
/// when `None`) and writes traces, summaries and the config echo.
pub fn run_experiment(config: &ExperimentConfig, threads: Option<usize>) -> Result<RunReport> {
    let started = Instant::now();
    let prepared = config.prepare()?;
    let directory = arm_directory(config);
    fs::create_dir_all(&directory).map_err(HarnessError::io(&directory))?;
    let echo = directory.join("config.toml");
    fs::write(&echo, emit(config)?).map_err(HarnessError::io(&echo))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    let seeds = pool.install(|| {
        let optimum = OptimumTable::build(&prepared.game, config.run.horizon);
        config
            .run
            .seeds
            .par_iter()
            .map(|&seed| run_seed(config, &prepared, &optimum, seed, &directory))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(RunReport {
        config: config.clone(),
        directory,
        seeds,
        wall_clock_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

fn run_seed(
    config: &ExperimentConfig,
    prepared: &Prepared,
    optimum: &OptimumTable,
    seed: u64,
    directory: &Path,
) -> Result<SeedRun> {
    let started = Instant::now();
    let horizon = config.run.horizon;
    let algorithm = config.learning.algorithm.algorithm();
    let steps = (horizon - 1) as usize;
    let trace = run_episode(
        &prepared.game,
        algorithm,
        prepared.params,
        steps,
        seed,
        prepared.initial.clone(),
    )?;

    let trace_path = directory.join(format!("seed-{seed}.csv"));
    write_trace(&trace, &trace_path)?;

    let phi = |k: usize| {
        trace.steps[k]
            .potential
            .expect("coverage games have a potential")
    };
    let last = trace.steps.len() - 1;
    let final_phi = phi(last);
    let final_optimum = optimum.at(horizon);
    let optimal_steps = (0..trace.steps.len())
        .filter(|&k| phi(k) >= optimum.at(trace.steps[k].t) - OPTIMAL_SLACK)
        .count();
    let tracking: Vec<f64> = (0..trace.steps.len())
        .filter(|&k| trace.steps[k].t > TRACKING_START)
        .map(|k| ratio(phi(k), optimum.at(trace.steps[k].t)))
        .collect();
    let every = config.run.checkpoint_every;
    let checkpoints = (0..trace.steps.len())
        .filter(|&k| trace.steps[k].t % every == 0 || k == last)
        .map(|k| (trace.steps[k].t, phi(k)))
        .collect();
    let summary = SeedSummary {
        algorithm: algorithm.tag().to_string(),
        seed,
        horizon,
        rows: trace.steps.len(),
        final_phi,
        optimum: final_optimum,
        optimum_method: optimum.method().name().to_string(),
        success: final_phi >= SUCCESS_FRACTION * final_optimum,
        optimal_fraction: optimal_steps as f64 / trace.steps.len() as f64,
        tracking_median: if prepared.game.world().density().is_time_varying() {
            median(&tracking)
        } else {
            None
        },
        checkpoints,
        wall_clock_ms: started.elapsed().as_secs_f64() * 1e3,
    };
    let summary_path = directory.join(format!("seed-{seed}.summary"));
    fs::write(&summary_path, summary.to_text()).map_err(HarnessError::io(&summary_path))?;
    Ok(SeedRun {
        summary,
        tracking,
        trace_path,
    })
}

pub fn trace_header(agents: usize) -> Vec<String> {
    let mut header = vec!["step".to_string(), "epsilon".to_string()];
    header.extend((0..agents).map(|i| format!("a_{i}")));
    header.extend((0..agents).map(|i| format!("u_{i}")));
    header.push("phi".to_string());
    header
}

pub fn write_trace(trace: &EpisodeTrace, path: &Path) -> Result<()> {
    let n = trace.initial.len();
    let mut w = csv::Writer::from_path(path).map_err(HarnessError::csv(path))?;
    w.write_record(trace_header(n))
        .map_err(HarnessError::csv(path))?;
    for step in &trace.steps {
        let mut row = vec![step.t.to_string(), step.epsilon.to_string()];
        row.extend(step.actions.actions().iter().map(|a| a.0.to_string()));
        row.extend(step.utilities.iter().map(f64::to_string));
        row.push(step.potential.map_or(String::new(), |p| p.to_string()));
        w.write_record(&row).map_err(HarnessError::csv(path))?;
    }
    w.flush().map_err(HarnessError::io(path))
}

/// A trace row read back from disk.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub t: u64,
    pub epsilon: f64,
    pub actions: JointAction,
    pub utilities: Vec<f64>,
    pub phi: f64,
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRow>> {
    let mut r = csv::Reader::from_path(path).map_err(HarnessError::csv(path))?;
    let width = r.headers().map_err(HarnessError::csv(path))?.len();
    if width < 5 || (width - 3) % 2 != 0 {
        return Err(HarnessError::Config(format!(
            "{}: {width} columns is not a trace",
            path.display()
        )));
    }
    let n = (width - 3) / 2;
    let bad = |what: &str| HarnessError::Config(format!("{}: bad {what}", path.display()));
    r.records()
        .map(|rec| {
            let rec = rec.map_err(HarnessError::csv(path))?;
            let num = |k: usize| rec[k].parse::<f64>().map_err(|_| bad("number"));
            Ok(TraceRow {
                t: rec[0].parse().map_err(|_| bad("step"))?,
                epsilon: num(1)?,
                actions: JointAction::new(
                    (0..n)
                        .map(|i| rec[2 + i].parse().map(ActionId).map_err(|_| bad("action")))
                        .collect::<Result<_>>()?,
                ),
                utilities: (0..n).map(|i| num(2 + n + i)).collect::<Result<_>>()?,
                phi: num(2 + 2 * n)?,
            })
        })
        .collect()
}

/// Largest `|φ_logged - φ(actions, t)|` and `|u_logged - U_i(actions, t)|`
/// over a trace read from disk.
pub fn trace_conservation(rows: &[TraceRow], game: &CoverageGame) -> f64 {
    rows.iter()
        .map(|row| {
            let phi = game.potential_at(row.t, &row.actions).unwrap_or(f64::NAN);
            let u = (0..row.utilities.len())
                .map(|i| (game.utility(AgentId(i), &row.actions, row.t) - row.utilities[i]).abs())
                .fold(0.0, f64::max);
            (phi - row.phi).abs().max(u)
        })
        .fold(0.0, f64::max)
}

/// Reads every `<dir>/<algorithm>/` written by [`run_experiment`] and
/// compares the arms.
pub fn analyze(dir: &Path) -> Result<Comparison> {
    let mut subdirs: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(HarnessError::io(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join("config.toml").is_file())
        .collect();
    subdirs.sort();
    if subdirs.is_empty() {
        return Err(HarnessError::Aggregate(format!(
            "no run directories under {}",
            dir.display()
        )));
    }
    let arms = subdirs
        .iter()
        .map(|sub| {
            let config = load_config(&sub.join("config.toml"))?;
            let mut files: Vec<PathBuf> = fs::read_dir(sub)
                .map_err(HarnessError::io(sub))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "summary"))
                .collect();
            files.sort();
            let summaries = files
                .iter()
                .map(|p| {
                    let text = fs::read_to_string(p).map_err(HarnessError::io(p))?;
                    SeedSummary::parse(&text, p)
                })
                .collect::<Result<_>>()?;
            Ok(Arm { config, summaries })
        })
        .collect::<Result<Vec<_>>>()?;
    aggregate(&arms)
}

/// Writes a comparison next to the arms.
pub fn write_comparison(dir: &Path, comparison: &Comparison) -> Result<()> {
    let path = dir.join("comparison.txt");
    let mut f = fs::File::create(&path).map_err(HarnessError::io(&path))?;
    write!(f, "{comparison}").map_err(HarnessError::io(&path))
}
