//! Sensor coverage on a grid: each agent picks a cell, senses a disk around
//! it, and is paid its equal share of the density it senses.

mod game;
mod world;

pub use game::{assemble, build_coverage_game, CoverageGame, SAMPLED_PROFILES};
pub use world::{
    max_unscaled_utility, moving_mean, scale_for_assumption2, CoverageWorld, DensityField,
    GridSpec, Point, DEFAULT_MARGIN, GAUSSIAN_SHAPE, MOVING_SETTLE_TIME, MOVING_START_TIME,
    OBSTACLE_COURSE,
};
