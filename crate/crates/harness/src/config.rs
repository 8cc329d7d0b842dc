//! Experiment configuration.
//!
//! Configs are TOML with four tables, every key optional:
//!
//! ```toml
//! [world]
//! width = 9
//! height = 6
//! cell_side = 0.3
//! offset = 0.15
//! sensing_radius = 0.3
//! obstacles = [[0.75, 1.35], [1.05, 1.05]]
//! margin = 0.01
//! # scale = 0.2        # fixed density scale instead of the automatic one
//!
//! [density]
//! kind = "gaussian"     # uniform | gaussian | moving-gaussian | tabulated
//! mean = [1.95, 1.35]
//!
//! [learning]
//! algorithm = "phpip"   # pipip | phpip | disl
//! kappa = 0.5
//! schedule = "constant" # constant | decaying
//! epsilon = 0.15
//!
//! [run]
//! agents = 4
//! horizon = 700
//! seeds = [0, 1, 2]
//! initial = [[0.15, 0.15], [0.15, 0.45], [0.45, 0.15], [0.45, 0.45]]
//! output = "out"
//! checkpoint_every = 100
//! ```
//!
//! Unknown keys are rejected. An empty file is a valid config.

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use pipip_core::coverage::{
    build_coverage_game, CoverageGame, CoverageWorld, DensityField, GridSpec, Point, GAUSSIAN_SHAPE,
};
use pipip_core::learning::{diameter, validate_kappa, Algorithm, EpsilonMode, LearnerParams};
use pipip_core::JointAction;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Starting cells of the four robots.
pub const DEFAULT_INITIAL: [Point; 4] = [[0.15, 0.15], [0.15, 0.45], [0.45, 0.15], [0.45, 0.45]];

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub world: WorldSection,
    pub density: DensitySpec,
    pub learning: LearningSection,
    pub run: RunSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorldSection {
    pub width: usize,
    pub height: usize,
    pub cell_side: f64,
    pub offset: f64,
    pub sensing_radius: f64,
    pub obstacles: Vec<Point>,
    pub margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

impl Default for WorldSection {
    fn default() -> Self {
        WorldSection {
            width: 9,
            height: 6,
            cell_side: 0.3,
            offset: 0.15,
            sensing_radius: 0.3,
            obstacles: Vec::new(),
            margin: pipip_core::coverage::DEFAULT_MARGIN,
            scale: None,
        }
    }
}

fn unit() -> f64 {
    1.0
}

fn gaussian_shape() -> f64 {
    GAUSSIAN_SHAPE
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DensitySpec {
    Uniform {
        #[serde(default = "unit")]
        value: f64,
    },
    Gaussian {
        mean: Point,
        #[serde(default = "gaussian_shape")]
        shape: f64,
    },
    MovingGaussian {
        #[serde(default = "gaussian_shape")]
        shape: f64,
    },
    /// One value per cell, row-major. `file` is read once at load time and
    /// its values are inlined so that the echoed config is self-contained.
    Tabulated {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        file: Option<PathBuf>,
        #[serde(default)]
        values: Vec<f64>,
    },
}

impl Default for DensitySpec {
    fn default() -> Self {
        DensitySpec::Uniform { value: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmChoice {
    Pipip,
    Phpip,
    Disl,
}

impl AlgorithmChoice {
    pub fn algorithm(self) -> Algorithm {
        match self {
            AlgorithmChoice::Pipip => Algorithm::Pipip,
            AlgorithmChoice::Phpip => Algorithm::Phpip,
            AlgorithmChoice::Disl => Algorithm::Disl,
        }
    }

    /// Lower-case name, also used as the output subdirectory.
    pub fn name(self) -> &'static str {
        match self {
            AlgorithmChoice::Pipip => "pipip",
            AlgorithmChoice::Phpip => "phpip",
            AlgorithmChoice::Disl => "disl",
        }
    }
}

impl fmt::Display for AlgorithmChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgorithmChoice {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pipip" => Ok(AlgorithmChoice::Pipip),
            "phpip" => Ok(AlgorithmChoice::Phpip),
            "disl" => Ok(AlgorithmChoice::Disl),
            other => Err(HarnessError::Config(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    Constant,
    Decaying,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearningSection {
    pub algorithm: AlgorithmChoice,
    pub kappa: f64,
    pub schedule: Schedule,
    /// Used by the constant schedule only.
    pub epsilon: f64,
}

impl Default for LearningSection {
    fn default() -> Self {
        LearningSection {
            algorithm: AlgorithmChoice::Phpip,
            kappa: 0.5,
            schedule: Schedule::Constant,
            epsilon: 0.15,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub agents: usize,
    /// Last time index; decisions are taken at `t = 2..=horizon`.
    pub horizon: u64,
    pub seeds: Vec<u64>,
    pub initial: Vec<Point>,
    pub output: PathBuf,
    pub checkpoint_every: u64,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            agents: 4,
            horizon: 700,
            seeds: vec![0],
            initial: DEFAULT_INITIAL.to_vec(),
            output: PathBuf::from("out"),
            checkpoint_every: 100,
        }
    }
}

/// A validated config together with the objects it describes.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub game: CoverageGame,
    pub params: LearnerParams,
    pub initial: JointAction,
}

/// Parses and validates; tabulated density files resolve against the
/// current directory.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    parse_config_in(text, Path::new("."))
}

/// Like [`parse_config`] with relative density files resolved against `base`.
pub fn parse_config_in(text: &str, base: &Path) -> Result<ExperimentConfig> {
    let mut config: ExperimentConfig = toml::from_str(text)?;
    if let DensitySpec::Tabulated {
        file: Some(file),
        values,
    } = &mut config.density
    {
        if values.is_empty() {
            let path = base.join(&*file);
            let text = std::fs::read_to_string(&path).map_err(HarnessError::io(&path))?;
            let grid = config.world.grid()?;
            let DensityField::Tabulated(parsed) = DensityField::parse_tabulated(&text, &grid)?
            else {
                unreachable!("parse_tabulated returns a table")
            };
            *values = parsed;
        }
    }
    config.prepare()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(HarnessError::io(path))?;
    parse_config_in(&text, path.parent().unwrap_or(Path::new(".")))
}

/// TOML text that parses back to `config`.
pub fn emit(config: &ExperimentConfig) -> Result<String> {
    Ok(toml::to_string(config)?)
}

impl WorldSection {
    pub fn grid(&self) -> Result<GridSpec> {
        Ok(GridSpec::new(
            self.width,
            self.height,
            self.cell_side,
            self.offset,
        )?)
    }
}

impl DensitySpec {
    pub fn field(&self) -> Result<DensityField> {
        Ok(match self {
            DensitySpec::Uniform { value } => DensityField::Uniform(*value),
            DensitySpec::Gaussian { mean, shape } => DensityField::Gaussian {
                mean: *mean,
                shape: *shape,
            },
            DensitySpec::MovingGaussian { shape } => DensityField::MovingGaussian { shape: *shape },
            DensitySpec::Tabulated { values, .. } if values.is_empty() => {
                return Err(HarnessError::Config(
                    "tabulated density needs `values` or `file`".into(),
                ))
            }
            DensitySpec::Tabulated { values, .. } => DensityField::Tabulated(values.clone()),
        })
    }
}

impl ExperimentConfig {
    pub fn world(&self) -> Result<CoverageWorld> {
        let w = &self.world;
        let mut world = CoverageWorld::new(w.grid()?, self.density.field()?)?
            .with_obstacle_points(&w.obstacles)?
            .with_sensing_radius(w.sensing_radius)?
            .with_margin(w.margin)?;
        if let Some(scale) = w.scale {
            world = world.with_scale(scale)?;
        }
        Ok(world)
    }

    pub fn epsilon_mode(&self) -> EpsilonMode {
        match self.learning.schedule {
            Schedule::Constant => EpsilonMode::Constant(self.learning.epsilon),
            Schedule::Decaying => EpsilonMode::Decaying,
        }
    }

    /// Checks everything that does not need the game, then builds and
    /// validates the game and checks `κ` against its largest choice set.
    pub fn prepare(&self) -> Result<Prepared> {
        let run = &self.run;
        if run.horizon < 2 {
            return Err(HarnessError::Config(format!("horizon {} < 2", run.horizon)));
        }
        if run.seeds.is_empty() {
            return Err(HarnessError::Config("seed list is empty".into()));
        }
        if let Some(big) = run.seeds.iter().find(|&&s| s > i64::MAX as u64) {
            return Err(HarnessError::Config(format!(
                "seed {big} does not fit a TOML integer (max 2^63 - 1)"
            )));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = run.seeds.iter().find(|s| !seen.insert(**s)) {
            return Err(HarnessError::Config(format!("seed {dup} listed twice")));
        }
        if run.initial.len() != run.agents {
            return Err(HarnessError::Config(format!(
                "{} initial positions for {} agents",
                run.initial.len(),
                run.agents
            )));
        }
        if run.checkpoint_every == 0 {
            return Err(HarnessError::Config(
                "checkpoint_every must be positive".into(),
            ));
        }
        match (self.learning.algorithm, self.learning.schedule) {
            (AlgorithmChoice::Pipip, Schedule::Constant) => {
                return Err(HarnessError::Config(
                    "pipip uses the decaying schedule; use phpip for a constant epsilon".into(),
                ))
            }
            (AlgorithmChoice::Phpip, Schedule::Decaying) => {
                return Err(HarnessError::Config(
                    "phpip needs schedule = \"constant\"".into(),
                ))
            }
            _ => {}
        }
        let game = build_coverage_game(&self.world()?, run.agents)?;
        validate_kappa(self.learning.kappa, game.game().constraints().max_choices())?;
        let params = LearnerParams::new(
            self.learning.kappa,
            self.epsilon_mode(),
            diameter(game.game())?,
        )?;
        let initial = game.joint_action_at(&run.initial)?;
        Ok(Prepared {
            game,
            params,
            initial,
        })
    }

    /// The same experiment with another learning rule. PIPIP switches to the
    /// decaying schedule and PHPIP to the constant one; DISL keeps the
    /// configured schedule.
    pub fn with_algorithm(&self, algorithm: AlgorithmChoice) -> Self {
        let mut c = self.clone();
        c.learning.algorithm = algorithm;
        match algorithm {
            AlgorithmChoice::Pipip => c.learning.schedule = Schedule::Decaying,
            AlgorithmChoice::Phpip => c.learning.schedule = Schedule::Constant,
            AlgorithmChoice::Disl => {}
        }
        c
    }

    /// Seeds `0..count`.
    pub fn with_seed_count(mut self, count: u64) -> Self {
        self.run.seeds = (0..count).collect();
        self
    }

    /// True when two arms describe the same experiment up to the learning rule.
    pub fn comparable(&self, other: &ExperimentConfig) -> bool {
        let strip = |c: &ExperimentConfig| {
            let mut run = c.run.clone();
            run.output = PathBuf::new();
            (c.world.clone(), c.density.clone(), run)
        };
        strip(self) == strip(other)
    }
}
