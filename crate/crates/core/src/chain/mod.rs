//! Exact analysis of the two-step chain induced by constant-`ε` learning.

mod arborescence;
mod export;
mod resistance;
mod space;
mod stability;

pub use arborescence::{min_in_tree, min_in_tree_exhaustive};
pub use export::{write_resistance_graph, write_stationary};
pub use resistance::{
    min_resistance_paths, min_resistance_paths_with_guard, recurrent_classes,
    recurrent_classes_unperturbed, route_reversal_check, single_deviator,
    straight_route_resistance, ResistanceGraph, RouteReversal, REVERSAL_TOLERANCE,
};
pub use space::{
    partition_agents, state_space, state_space_size, state_space_with_guard,
    transition_probability, transition_resistance, AgentPartition, Behaviour, ChainState,
    StateSpace, Transition, TransitionModel, DEFAULT_STATE_GUARD,
};
pub use stability::{
    optimal_mass, optimal_mass_in, stationary_distribution, stationary_of, stochastic_potentials,
    tree_potentials, SolveMethod, StationaryDistribution, StochasticPotentials, DENSE_LIMIT,
};
