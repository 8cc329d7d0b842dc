//! Stochastic potentials of the diagonal states and the stationary
//! distribution of the perturbed chain.

use nalgebra::{DMatrix, DVector};

use super::arborescence::{min_in_tree, min_in_tree_exhaustive};
use super::resistance::{min_resistance_paths, ResistanceGraph};
use super::space::{ChainState, StateSpace, TransitionModel};
use crate::error::{Error, Result};
use crate::game::{optimal_nash, GameDefinition, JointAction};

/// Largest `|B|` solved by dense LU; larger chains use power iteration.
pub const DENSE_LIMIT: usize = 2000;
pub const POWER_TOLERANCE: f64 = 1e-12;
pub const POWER_MAX_ITERATIONS: usize = 2_000_000;
/// Above this many diagonal states the enumeration cross-check is skipped.
pub const EXHAUSTIVE_LIMIT: usize = 6;
pub const POTENTIAL_TIE: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct StochasticPotentials {
    pub nodes: Vec<JointAction>,
    pub values: Vec<f64>,
}

impl StochasticPotentials {
    pub fn minimum(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Profiles whose stochastic potential is minimal.
    pub fn stable(&self) -> Vec<JointAction> {
        let min = self.minimum();
        self.nodes
            .iter()
            .zip(&self.values)
            .filter(|(_, &v)| v <= min + POTENTIAL_TIE)
            .map(|(a, _)| a.clone())
            .collect()
    }
}

/// Minimum in-tree weight into every node, using only edges of the given matrix.
pub fn tree_potentials(
    graph: &ResistanceGraph,
    weights: &[Vec<f64>],
) -> Result<StochasticPotentials> {
    let values = (0..graph.len())
        .map(|root| {
            let fast = min_in_tree(weights, root).ok_or(Error::NotSpanning)?;
            if graph.len() <= EXHAUSTIVE_LIMIT {
                let slow = min_in_tree_exhaustive(weights, root).ok_or(Error::NotSpanning)?;
                if (fast - slow).abs() > POTENTIAL_TIE {
                    return Err(Error::Solver(format!(
                        "arborescence mismatch at root {root}: {fast} vs enumerated {slow}"
                    )));
                }
            }
            Ok(fast)
        })
        .collect::<Result<_>>()?;
    Ok(StochasticPotentials {
        nodes: graph.nodes().to_vec(),
        values,
    })
}

/// Stochastic potentials over single-deviation trees.
pub fn stochastic_potentials(game: &GameDefinition) -> Result<StochasticPotentials> {
    let graph = min_resistance_paths(game)?;
    tree_potentials(&graph, &graph.single_weights())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMethod {
    DenseLu,
    PowerIteration,
}

#[derive(Clone, Debug)]
pub struct StationaryDistribution {
    space: StateSpace,
    mass: Vec<f64>,
    residual: f64,
    method: SolveMethod,
}

impl StationaryDistribution {
    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// `max |μP - μ|`.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn method(&self) -> SolveMethod {
        self.method
    }

    pub fn mass_of(&self, z: &ChainState) -> f64 {
        self.space.index_of(z).map_or(0.0, |k| self.mass[k])
    }
}

pub fn stationary_distribution(
    game: &GameDefinition,
    epsilon: f64,
    kappa: f64,
) -> Result<StationaryDistribution> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!("epsilon {epsilon} outside (0, 1)")));
    }
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::Domain(format!("kappa {kappa} outside (0, 1]")));
    }
    let model = TransitionModel::build(game, epsilon, kappa)?;
    stationary_of(model)
}

pub fn stationary_of(model: TransitionModel) -> Result<StationaryDistribution> {
    let n = model.space().len();
    let (mut mass, method) = if n <= DENSE_LIMIT {
        (solve_dense(&model)?, SolveMethod::DenseLu)
    } else {
        (solve_power(&model)?, SolveMethod::PowerIteration)
    };
    for m in &mut mass {
        if *m < 0.0 {
            if *m < -1e-12 {
                return Err(Error::Solver(format!("negative stationary mass {m}")));
            }
            *m = 0.0;
        }
    }
    let total: f64 = mass.iter().sum();
    mass.iter_mut().for_each(|m| *m /= total);
    let residual = model
        .left_multiply(&mass)
        .iter()
        .zip(&mass)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(StationaryDistribution {
        space: model.space().clone(),
        mass,
        residual,
        method,
    })
}

/// Solves `(P^T - I) μ = 0` with the last equation replaced by `Σ μ = 1`.
fn solve_dense(model: &TransitionModel) -> Result<Vec<f64>> {
    let n = model.space().len();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for (from, row) in model.rows().iter().enumerate() {
        for t in row {
            a[(t.to, from)] += t.probability;
        }
    }
    for k in 0..n {
        a[(k, k)] -= 1.0;
    }
    a.row_mut(n - 1).fill(1.0);
    let mut b = DVector::<f64>::zeros(n);
    b[n - 1] = 1.0;
    a.lu()
        .solve(&b)
        .map(|x| x.iter().copied().collect())
        .ok_or_else(|| Error::Solver("singular system; chain is not irreducible".into()))
}

fn solve_power(model: &TransitionModel) -> Result<Vec<f64>> {
    let n = model.space().len();
    let mut mu = vec![1.0 / n as f64; n];
    for _ in 0..POWER_MAX_ITERATIONS {
        let next = model.left_multiply(&mu);
        let change = next
            .iter()
            .zip(&mu)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        mu = next;
        if change <= POWER_TOLERANCE {
            return Ok(mu);
        }
    }
    Err(Error::Solver(format!(
        "power iteration did not reach {POWER_TOLERANCE} in {POWER_MAX_ITERATIONS} iterations"
    )))
}

/// Stationary mass on `{(a, a) : a maximizes φ}`.
pub fn optimal_mass(dist: &StationaryDistribution, game: &GameDefinition) -> Result<f64> {
    optimal_mass_in(dist.space(), dist.mass(), game)
}

/// [`optimal_mass`] for an arbitrary vector over `B`.
pub fn optimal_mass_in(space: &StateSpace, mass: &[f64], game: &GameDefinition) -> Result<f64> {
    if mass.len() != space.len() {
        return Err(Error::Domain(format!(
            "{} masses for {} states",
            mass.len(),
            space.len()
        )));
    }
    Ok(optimal_nash(game)?
        .into_iter()
        .filter_map(|a| space.index_of(&ChainState::diagonal(a)))
        .map(|k| mass[k])
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::ConstraintMap;
    use crate::toys;

    #[test]
    fn constant_game_potentials_are_equal() {
        let cm = ConstraintMap::complete(&[2, 2]).unwrap();
        let game = GameDefinition::identical_interest(cm, |_| 0.25);
        let p = stochastic_potentials(&game).unwrap();
        // Three unit-resistance moves are needed to tie four profiles together.
        for v in &p.values {
            assert!((v - 3.0).abs() < 1e-12, "{v}");
        }
        assert_eq!(p.stable().len(), 4);
    }

    #[test]
    fn path_game_prefers_the_top() {
        let game = toys::path_single_agent();
        let p = stochastic_potentials(&game).unwrap();
        assert_eq!(p.stable(), vec![JointAction::from_indices(&[2])]);
        let dist = stationary_distribution(&game, 0.05, 0.5).unwrap();
        assert!(dist.residual() <= 1e-10);
        assert_eq!(dist.method(), SolveMethod::DenseLu);
        let total: f64 = dist.mass().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(optimal_mass(&dist, &game).unwrap() > 0.5);
    }

    #[test]
    fn power_iteration_agrees_with_lu() {
        let game = toys::coordination_3x3();
        let model = TransitionModel::build(&game, 0.2, 0.5).unwrap();
        let dense = solve_dense(&model).unwrap();
        let power = solve_power(&model).unwrap();
        for (a, b) in dense.iter().zip(&power) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let game = toys::path_single_agent();
        assert!(stationary_distribution(&game, 0.0, 0.5).is_err());
        assert!(stationary_distribution(&game, 0.1, 0.0).is_err());
    }
}
