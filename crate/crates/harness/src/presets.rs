//! Built-in experiment configs.

use std::path::PathBuf;

use pipip_core::coverage::OBSTACLE_COURSE;

use crate::config::{
    AlgorithmChoice, DensitySpec, ExperimentConfig, LearningSection, RunSection, Schedule,
    WorldSection,
};

/// Static Gaussian behind a diagonal wall of four obstacles; PHPIP with
/// `ε = 0.15`, `κ = 0.5`, 700 steps, 50 seeds.
pub fn experiment1() -> ExperimentConfig {
    ExperimentConfig {
        world: WorldSection {
            obstacles: OBSTACLE_COURSE.to_vec(),
            ..WorldSection::default()
        },
        density: DensitySpec::Gaussian {
            mean: [1.95, 1.35],
            shape: pipip_core::coverage::GAUSSIAN_SHAPE,
        },
        learning: LearningSection {
            algorithm: AlgorithmChoice::Phpip,
            kappa: 0.5,
            schedule: Schedule::Constant,
            epsilon: 0.15,
        },
        run: RunSection {
            horizon: 700,
            seeds: (0..50).collect(),
            output: PathBuf::from("out/experiment1"),
            ..RunSection::default()
        },
    }
}

/// [`experiment1`] with `ε = 0.3`.
pub fn experiment1_high_exploration() -> ExperimentConfig {
    let mut c = experiment1();
    c.learning.epsilon = 0.3;
    c.run.output = PathBuf::from("out/experiment1-eps03");
    c
}

/// Gaussian target moving across the open field between steps 300 and
/// 700; 1000 steps, 20 seeds.
pub fn experiment2() -> ExperimentConfig {
    ExperimentConfig {
        world: WorldSection::default(),
        density: DensitySpec::MovingGaussian {
            shape: pipip_core::coverage::GAUSSIAN_SHAPE,
        },
        learning: LearningSection::default(),
        run: RunSection {
            horizon: 1000,
            seeds: (0..20).collect(),
            output: PathBuf::from("out/experiment2"),
            ..RunSection::default()
        },
    }
}

pub fn all() -> Vec<(&'static str, ExperimentConfig)> {
    vec![
        ("experiment1", experiment1()),
        ("experiment1-eps03", experiment1_high_exploration()),
        ("experiment2", experiment2()),
    ]
}

pub fn by_name(name: &str) -> Option<ExperimentConfig> {
    all().into_iter().find(|(n, _)| *n == name).map(|(_, c)| c)
}
