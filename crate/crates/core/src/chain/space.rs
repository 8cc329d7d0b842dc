//! The state space `B` of consecutive joint-action pairs and the exact
//! transition law of the constant-`ε` partially irrational chain on it.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::game::{ActionId, AgentId, GameDefinition, JointAction, JointActions};

/// Default bound on `|B|`.
pub const DEFAULT_STATE_GUARD: u128 = 100_000;

/// `z = (a(t-1), a(t))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChainState {
    pub prev: JointAction,
    pub curr: JointAction,
}

impl ChainState {
    pub fn new(prev: JointAction, curr: JointAction) -> Self {
        ChainState { prev, curr }
    }

    /// `(a, a)`.
    pub fn diagonal(a: JointAction) -> Self {
        ChainState {
            prev: a.clone(),
            curr: a,
        }
    }

    pub fn is_diagonal(&self) -> bool {
        self.prev == self.curr
    }

    pub fn is_feasible(&self, game: &GameDefinition) -> bool {
        self.prev.len() == game.num_agents()
            && self.curr.len() == game.num_agents()
            && game.validate(&self.prev).is_ok()
            && game.validate(&self.curr).is_ok()
            && self
                .prev
                .iter()
                .all(|(agent, a)| game.constraints().contains(agent, a, self.curr.get(agent)))
    }
}

/// Enumerated `B` with a reverse index.
#[derive(Clone, Debug)]
pub struct StateSpace {
    states: Vec<ChainState>,
    index: HashMap<ChainState, usize>,
}

impl StateSpace {
    pub fn states(&self) -> &[ChainState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, z: &ChainState) -> Option<usize> {
        self.index.get(z).copied()
    }

    pub fn diagonal_indices(&self) -> Vec<usize> {
        (0..self.states.len())
            .filter(|&k| self.states[k].is_diagonal())
            .collect()
    }
}

/// Chain analysis needs `(a, a) ∈ B` for every `a`, i.e. `a_i ∈ R_i(a_i)`.
pub(crate) fn require_self_loops(game: &GameDefinition) -> Result<()> {
    for i in 0..game.num_agents() {
        let agent = AgentId(i);
        for a in 0..game.num_actions(agent) {
            if !game.constraints().contains(agent, ActionId(a), ActionId(a)) {
                return Err(Error::InvalidGame(format!(
                    "agent {i}: action {a} is not in its own constrained set; diagonal states would leave B"
                )));
            }
        }
    }
    Ok(())
}

/// `|B| = prod_i sum_{a_i} |R_i(a_i)|`, saturating.
pub fn state_space_size(game: &GameDefinition) -> u128 {
    (0..game.num_agents())
        .map(|i| {
            let agent = AgentId(i);
            (0..game.num_actions(agent))
                .map(|a| game.constraints().set(agent, ActionId(a)).len() as u128)
                .sum::<u128>()
        })
        .fold(1u128, |acc, s| acc.saturating_mul(s))
}

pub fn state_space(game: &GameDefinition) -> Result<StateSpace> {
    state_space_with_guard(game, DEFAULT_STATE_GUARD)
}

pub fn state_space_with_guard(game: &GameDefinition, guard: u128) -> Result<StateSpace> {
    require_self_loops(game)?;
    let size = state_space_size(game);
    if size > guard {
        return Err(Error::GuardExceeded { size, guard });
    }
    // Per agent, the feasible (a_i, a'_i) pairs; B is their product.
    let pairs: Vec<Vec<(ActionId, ActionId)>> = (0..game.num_agents())
        .map(|i| {
            let agent = AgentId(i);
            (0..game.num_actions(agent))
                .flat_map(|a| {
                    game.constraints()
                        .set(agent, ActionId(a))
                        .iter()
                        .map(move |&b| (ActionId(a), b))
                })
                .collect()
        })
        .collect();
    let radices = pairs.iter().map(Vec::len).collect();
    let mut states = Vec::with_capacity(size as usize);
    for choice in JointActions::new(radices) {
        let (prev, curr): (Vec<_>, Vec<_>) =
            choice.iter().map(|(agent, k)| pairs[agent.0][k.0]).unzip();
        states.push(ChainState::new(
            JointAction::new(prev),
            JointAction::new(curr),
        ));
    }
    let index = states
        .iter()
        .enumerate()
        .map(|(k, z)| (z.clone(), k))
        .collect();
    Ok(StateSpace { states, index })
}

/// How one agent moved along a transition `(a0, a1) -> (a1, a2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Behaviour {
    /// Utility did not drop; explored a new action.
    Explore,
    /// Utility did not drop; kept `a1`.
    Stay,
    /// Utility dropped; explored an action other than `a0` and `a1`.
    ExploreAfterDrop,
    /// Utility dropped; kept the worse action `a1`.
    IrrationalStay,
    /// Utility dropped; went back to `a0` (or kept `a1` when `a0 = a1`).
    Revert,
}

impl Behaviour {
    pub const ALL: [Behaviour; 5] = [
        Behaviour::Explore,
        Behaviour::Stay,
        Behaviour::ExploreAfterDrop,
        Behaviour::IrrationalStay,
        Behaviour::Revert,
    ];
}

/// The five-way split of the agents along one transition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgentPartition {
    roles: Vec<Behaviour>,
}

impl AgentPartition {
    pub fn role(&self, agent: AgentId) -> Behaviour {
        self.roles[agent.0]
    }

    pub fn roles(&self) -> &[Behaviour] {
        &self.roles
    }

    pub fn members(&self, behaviour: Behaviour) -> Vec<AgentId> {
        self.roles
            .iter()
            .enumerate()
            .filter(|(_, &r)| r == behaviour)
            .map(|(i, _)| AgentId(i))
            .collect()
    }

    /// `[Λ1, Λ2, Λ3, Λ4, Λ5]`.
    pub fn sets(&self) -> [Vec<AgentId>; 5] {
        Behaviour::ALL.map(|b| self.members(b))
    }
}

/// Everything the transition law needs about one agent on one transition.
#[derive(Clone, Copy, Debug)]
pub(crate) struct AgentMove<'g> {
    pub restricted: &'g [ActionId],
    pub a0: ActionId,
    pub a1: ActionId,
    pub u0: f64,
    pub u1: f64,
}

impl AgentMove<'_> {
    fn dropped(&self) -> bool {
        self.u1 < self.u0
    }

    fn delta(&self) -> f64 {
        self.u0 - self.u1
    }

    /// `|R_i(a1) \ {a1}|`.
    fn fresh_count(&self) -> usize {
        self.restricted.iter().filter(|&&b| b != self.a1).count()
    }

    /// `|R_i(a1) \ {a0, a1}|`.
    fn strict_fresh_count(&self) -> usize {
        self.restricted
            .iter()
            .filter(|&&b| b != self.a1 && b != self.a0)
            .count()
    }

    pub fn classify(&self, a2: ActionId) -> Option<Behaviour> {
        if !self.restricted.contains(&a2) {
            return None;
        }
        let role = if !self.dropped() {
            if a2 == self.a1 {
                Behaviour::Stay
            } else {
                Behaviour::Explore
            }
        } else if a2 == self.a1 {
            if self.a0 == self.a1 {
                Behaviour::Revert
            } else {
                Behaviour::IrrationalStay
            }
        } else if a2 == self.a0 {
            Behaviour::Revert
        } else {
            Behaviour::ExploreAfterDrop
        };
        Some(role)
    }

    /// Probability factor of `role` at `(ε, κ)`.
    pub fn probability(&self, role: Behaviour, epsilon: f64, kappa: f64) -> f64 {
        let keep_worse = || kappa * epsilon.powf(self.delta());
        match role {
            Behaviour::Explore => epsilon / self.fresh_count() as f64,
            Behaviour::Stay => 1.0 - epsilon,
            Behaviour::ExploreAfterDrop => epsilon / self.strict_fresh_count() as f64,
            Behaviour::IrrationalStay => (1.0 - epsilon) * keep_worse(),
            Behaviour::Revert if self.a0 == self.a1 => 1.0 - epsilon,
            Behaviour::Revert => {
                let back = (1.0 - epsilon) * (1.0 - keep_worse());
                // Fewer than three choices: exploration falls back to R \ {a1} = {a0, ..}.
                if self.strict_fresh_count() == 0 {
                    back + epsilon / self.fresh_count() as f64
                } else {
                    back
                }
            }
        }
    }

    /// Exponent of `ε` in [`Self::probability`] as `ε -> 0`.
    pub fn resistance(&self, role: Behaviour) -> f64 {
        match role {
            Behaviour::Explore | Behaviour::ExploreAfterDrop => 1.0,
            Behaviour::Stay | Behaviour::Revert => 0.0,
            Behaviour::IrrationalStay => self.delta(),
        }
    }
}

pub(crate) fn agent_moves<'g>(game: &'g GameDefinition, z: &ChainState) -> Vec<AgentMove<'g>> {
    z.curr
        .iter()
        .map(|(agent, a1)| AgentMove {
            restricted: game.constraints().set(agent, a1),
            a0: z.prev.get(agent),
            a1,
            u0: game.utility(agent, &z.prev),
            u1: game.utility(agent, &z.curr),
        })
        .collect()
}

fn check_pair(game: &GameDefinition, z1: &ChainState, z2: &ChainState) -> Result<()> {
    if !z1.is_feasible(game) || !z2.is_feasible(game) {
        return Err(Error::NotInStateSpace);
    }
    if z2.prev != z1.curr {
        return Err(Error::MismatchedChaining);
    }
    Ok(())
}

/// Classifies every agent on `z1 -> z2`; `None` if the transition is impossible.
pub fn partition_agents(
    z1: &ChainState,
    z2: &ChainState,
    game: &GameDefinition,
) -> Result<Option<AgentPartition>> {
    check_pair(game, z1, z2)?;
    let roles: Option<Vec<Behaviour>> = agent_moves(game, z1)
        .iter()
        .zip(z2.curr.actions())
        .map(|(m, &a2)| m.classify(a2))
        .collect();
    Ok(roles.map(|roles| AgentPartition { roles }))
}

/// Product over agents of the per-behaviour factors; zero when infeasible.
pub fn transition_probability(
    z1: &ChainState,
    z2: &ChainState,
    epsilon: f64,
    kappa: f64,
    game: &GameDefinition,
) -> Result<f64> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::Domain(format!("epsilon {epsilon} outside [0, 1)")));
    }
    let Some(partition) = partition_agents(z1, z2, game)? else {
        return Ok(0.0);
    };
    Ok(agent_moves(game, z1)
        .iter()
        .zip(partition.roles())
        .map(|(m, &role)| m.probability(role, epsilon, kappa))
        .product())
}

/// `|Λ1| + |Λ3| + Σ_{Λ4} Δ_i`, or `+∞` for an impossible transition.
pub fn transition_resistance(
    z1: &ChainState,
    z2: &ChainState,
    game: &GameDefinition,
) -> Result<f64> {
    let Some(partition) = partition_agents(z1, z2, game)? else {
        return Ok(f64::INFINITY);
    };
    Ok(agent_moves(game, z1)
        .iter()
        .zip(partition.roles())
        .map(|(m, &role)| m.resistance(role))
        .sum())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transition {
    pub to: usize,
    pub probability: f64,
    pub resistance: f64,
}

/// Sparse transition rows of the chain on `B` at fixed `(ε, κ)`.
#[derive(Clone, Debug)]
pub struct TransitionModel {
    space: StateSpace,
    epsilon: f64,
    kappa: f64,
    rows: Vec<Vec<Transition>>,
}

impl TransitionModel {
    pub fn build(game: &GameDefinition, epsilon: f64, kappa: f64) -> Result<Self> {
        Self::build_with_guard(game, epsilon, kappa, DEFAULT_STATE_GUARD)
    }

    pub fn build_with_guard(
        game: &GameDefinition,
        epsilon: f64,
        kappa: f64,
        guard: u128,
    ) -> Result<Self> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::Domain(format!("epsilon {epsilon} outside [0, 1)")));
        }
        let space = state_space_with_guard(game, guard)?;
        let rows = space
            .states()
            .iter()
            .map(|z| Self::row(game, &space, z, epsilon, kappa))
            .collect();
        Ok(TransitionModel {
            space,
            epsilon,
            kappa,
            rows,
        })
    }

    /// Enumerates the product of per-agent outcome distributions; entries
    /// with zero probability and finite resistance are kept so that the
    /// resistance graph sees every feasible transition.
    fn row(
        game: &GameDefinition,
        space: &StateSpace,
        z: &ChainState,
        epsilon: f64,
        kappa: f64,
    ) -> Vec<Transition> {
        let moves = agent_moves(game, z);
        let outcomes: Vec<Vec<(ActionId, f64, f64)>> = moves
            .iter()
            .map(|m| {
                m.restricted
                    .iter()
                    .map(|&b| {
                        let role = m.classify(b).expect("b drawn from R_i(a1)");
                        (b, m.probability(role, epsilon, kappa), m.resistance(role))
                    })
                    .collect()
            })
            .collect();
        let radices = outcomes.iter().map(Vec::len).collect();
        JointActions::new(radices)
            .map(|choice| {
                let mut next = Vec::with_capacity(choice.len());
                let (mut p, mut r) = (1.0, 0.0);
                for (agent, k) in choice.iter() {
                    let (b, pb, rb) = outcomes[agent.0][k.0];
                    next.push(b);
                    p *= pb;
                    r += rb;
                }
                let target = ChainState::new(z.curr.clone(), JointAction::new(next));
                Transition {
                    to: space.index_of(&target).expect("successor lies in B"),
                    probability: p,
                    resistance: r,
                }
            })
            .collect()
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn rows(&self) -> &[Vec<Transition>] {
        &self.rows
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|t| t.probability).sum())
            .collect()
    }

    /// `μ P` for a row vector `μ`.
    pub fn left_multiply(&self, mu: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; mu.len()];
        for (from, row) in self.rows.iter().enumerate() {
            let m = mu[from];
            if m != 0.0 {
                for t in row {
                    out[t.to] += m * t.probability;
                }
            }
        }
        out
    }
}
