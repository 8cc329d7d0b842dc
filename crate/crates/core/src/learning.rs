//! Payoff-based learning rules with two-step memory.
//!
//! Each agent remembers its last two actions and the utilities they earned.
//! If the most recent utility is at least as high as the older one the agent
//! keeps its action, exploring a fresh constrained action with probability
//! `ε`. If utility dropped it explores (`ε`), keeps the worse action with
//! probability `(1-ε)·κ·ε^Δ` (the partially irrational choice), or reverts to
//! the better remembered action. DISL is the same rule without the
//! irrational branch.
//!
//! All agents decide synchronously from their memories, then utilities are
//! evaluated at the new joint action and memories shift by one step.

use std::collections::VecDeque;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{ActionId, AgentId, GameDefinition, JointAction};

/// `ε(t) = t^(-1/(n(D+1)))`.
pub fn exploration_rate(t: u64, agents: usize, diameter: usize) -> Result<f64> {
    if t < 2 || agents == 0 || diameter == 0 {
        return Err(Error::Domain(format!(
            "exploration rate needs t >= 2, n >= 1, D >= 1 (got t={t}, n={agents}, D={diameter})"
        )));
    }
    let exponent = -1.0 / (agents as f64 * (diameter as f64 + 1.0));
    Ok((t as f64).powf(exponent))
}

/// `D = max_i D_i`, where `D_i` is the diameter of agent `i`'s constraint graph.
pub fn diameter(game: &GameDefinition) -> Result<usize> {
    let cm = game.constraints();
    let mut overall = 0;
    for i in 0..game.num_agents() {
        let agent = AgentId(i);
        let m = cm.num_actions(agent);
        for source in 0..m {
            let mut dist = vec![usize::MAX; m];
            dist[source] = 0;
            let mut queue = VecDeque::from([source]);
            while let Some(a) = queue.pop_front() {
                for b in cm.set(agent, ActionId(a)) {
                    if dist[b.0] == usize::MAX {
                        dist[b.0] = dist[a] + 1;
                        queue.push_back(b.0);
                    }
                }
            }
            let far = *dist.iter().max().unwrap();
            if far == usize::MAX {
                return Err(Error::Disconnected(agent));
            }
            overall = overall.max(far);
        }
    }
    Ok(overall)
}

/// Checks `κ ∈ (1/(C-1), 1/2]` for a game whose largest constrained action
/// set has `max_choices` elements.
pub fn validate_kappa(kappa: f64, max_choices: usize) -> Result<()> {
    let lower = if max_choices >= 2 {
        1.0 / (max_choices as f64 - 1.0)
    } else {
        f64::INFINITY
    };
    if kappa > lower && kappa <= 0.5 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "kappa {kappa} outside ({lower}, 0.5] for C = {max_choices}"
        )))
    }
}

/// Two-step memory of a single agent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AgentMemory {
    /// Action taken at `t-1`.
    pub recent: ActionId,
    /// Action taken at `t-2`.
    pub older: ActionId,
    pub recent_utility: f64,
    pub older_utility: f64,
    /// `older_utility - recent_utility`.
    pub delta: f64,
}

impl AgentMemory {
    /// Both slots hold the initial action, `Δ = 0`.
    pub fn new(action: ActionId, utility: f64) -> Self {
        AgentMemory {
            recent: action,
            older: action,
            recent_utility: utility,
            older_utility: utility,
            delta: 0.0,
        }
    }

    /// Memory as it would be after taking `older` then `recent`.
    pub fn from_history(
        older: ActionId,
        older_utility: f64,
        recent: ActionId,
        recent_utility: f64,
    ) -> Self {
        AgentMemory {
            recent,
            older,
            recent_utility,
            older_utility,
            delta: older_utility - recent_utility,
        }
    }

    pub fn record(&mut self, action: ActionId, utility: f64) {
        self.older = self.recent;
        self.recent = action;
        self.older_utility = self.recent_utility;
        self.recent_utility = utility;
        self.delta = self.older_utility - self.recent_utility;
    }

    /// Utility fell between the last two steps.
    pub fn dropped(&self) -> bool {
        self.recent_utility < self.older_utility
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    /// Keeps a worse action with probability `(1-ε)κε^Δ`.
    PartiallyIrrational,
    /// Always reverts to the better remembered action unless exploring.
    Disl,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Partially irrational rule with the decaying schedule `ε(t)`.
    Pipip,
    /// Partially irrational rule with a constant `ε`.
    Phpip,
    /// Baseline without irrational decisions; either schedule.
    Disl,
}

impl Algorithm {
    pub fn rule(self) -> Rule {
        match self {
            Algorithm::Pipip | Algorithm::Phpip => Rule::PartiallyIrrational,
            Algorithm::Disl => Rule::Disl,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Algorithm::Pipip => "PIPIP",
            Algorithm::Phpip => "PHPIP",
            Algorithm::Disl => "DISL",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EpsilonMode {
    /// `ε(t) = t^(-1/(n(D+1)))`.
    Decaying,
    Constant(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LearnerParams {
    pub kappa: f64,
    pub epsilon: EpsilonMode,
    /// Constraint-graph diameter bound `D` used by the decaying schedule.
    pub diameter: usize,
}

impl LearnerParams {
    pub fn new(kappa: f64, epsilon: EpsilonMode, diameter: usize) -> Result<Self> {
        if !(kappa > 0.0 && kappa <= 1.0) {
            return Err(Error::Domain(format!("kappa {kappa} outside (0, 1]")));
        }
        if let EpsilonMode::Constant(eps) = epsilon {
            if !(eps > 0.0 && eps <= 0.5) {
                return Err(Error::Domain(format!(
                    "constant epsilon {eps} outside (0, 1/2]"
                )));
            }
        }
        if diameter == 0 {
            return Err(Error::Domain("diameter bound must be positive".into()));
        }
        Ok(LearnerParams {
            kappa,
            epsilon,
            diameter,
        })
    }

    pub fn epsilon_at(&self, t: u64, agents: usize) -> Result<f64> {
        match self.epsilon {
            EpsilonMode::Decaying => exploration_rate(t, agents, self.diameter),
            EpsilonMode::Constant(eps) => Ok(eps),
        }
    }
}

/// Probability mass of the three possible decisions of one agent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Branches {
    pub explore: f64,
    /// Keep the most recent action.
    pub stay: f64,
    /// Return to the older action. Zero unless utility dropped.
    pub revert: f64,
}

impl Branches {
    pub fn total(&self) -> f64 {
        self.explore + self.stay + self.revert
    }
}

pub fn branch_probabilities(
    agent: AgentId,
    memory: &AgentMemory,
    epsilon: f64,
    kappa: f64,
    rule: Rule,
) -> Result<Branches> {
    if !memory.dropped() {
        return Ok(Branches {
            explore: epsilon,
            stay: 1.0 - epsilon,
            revert: 0.0,
        });
    }
    if memory.delta >= 1.0 {
        return Err(Error::UtilityStepTooLarge {
            agent,
            delta: memory.delta,
        });
    }
    let keep_worse = match rule {
        Rule::PartiallyIrrational => kappa * epsilon.powf(memory.delta),
        Rule::Disl => 0.0,
    };
    Ok(Branches {
        explore: epsilon,
        stay: (1.0 - epsilon) * keep_worse,
        revert: (1.0 - epsilon) * (1.0 - keep_worse),
    })
}

/// Candidates of an exploratory decision: `R_i(a1) \ {a1}` when utility did
/// not drop, otherwise `R_i(a1) \ {a1, a2}`. If the latter is empty (games
/// with fewer than three choices) the draw falls back to `R_i(a1) \ {a1}`.
pub fn exploration_set(memory: &AgentMemory, restricted: &[ActionId]) -> Vec<ActionId> {
    let fresh: Vec<ActionId> = restricted
        .iter()
        .copied()
        .filter(|&b| b != memory.recent)
        .collect();
    if !memory.dropped() {
        return fresh;
    }
    let strict: Vec<ActionId> = fresh
        .iter()
        .copied()
        .filter(|&b| b != memory.older)
        .collect();
    if strict.is_empty() {
        fresh
    } else {
        strict
    }
}

/// Resolves a decision from a uniform draw in `[0, 1)`. `pick` maps the size
/// of the exploration set to an index and is only called when exploring.
pub fn decide(
    memory: &AgentMemory,
    branches: &Branches,
    exploration: &[ActionId],
    uniform: f64,
    pick: impl FnOnce(usize) -> usize,
) -> ActionId {
    if uniform < branches.explore {
        exploration[pick(exploration.len())]
    } else if !memory.dropped() || uniform < branches.explore + branches.stay {
        memory.recent
    } else {
        memory.older
    }
}

fn step_with_rule<R: RngCore + ?Sized>(
    rule: Rule,
    agent: AgentId,
    memory: &AgentMemory,
    restricted: &[ActionId],
    epsilon: f64,
    kappa: f64,
    rng: &mut R,
) -> Result<ActionId> {
    let branches = branch_probabilities(agent, memory, epsilon, kappa, rule)?;
    let exploration = exploration_set(memory, restricted);
    if exploration.is_empty() {
        return Err(Error::EmptyExplorationSet {
            agent,
            action: memory.recent,
        });
    }
    let uniform: f64 = rng.random();
    Ok(decide(memory, &branches, &exploration, uniform, |len| {
        rng.random_range(0..len)
    }))
}

/// One partially irrational decision. `restricted` is `R_i(a1)`.
pub fn pipip_step<R: RngCore + ?Sized>(
    agent: AgentId,
    memory: &AgentMemory,
    restricted: &[ActionId],
    epsilon: f64,
    kappa: f64,
    rng: &mut R,
) -> Result<ActionId> {
    step_with_rule(
        Rule::PartiallyIrrational,
        agent,
        memory,
        restricted,
        epsilon,
        kappa,
        rng,
    )
}

/// One DISL decision. Consumes the RNG exactly like [`pipip_step`].
pub fn disl_step<R: RngCore + ?Sized>(
    agent: AgentId,
    memory: &AgentMemory,
    restricted: &[ActionId],
    epsilon: f64,
    rng: &mut R,
) -> Result<ActionId> {
    step_with_rule(Rule::Disl, agent, memory, restricted, epsilon, 0.0, rng)
}

/// Utility and potential source for an episode. Static games use the
/// [`GameDefinition`] oracles; time-varying environments override the
/// `*_at` methods.
pub trait Environment: Sync {
    fn game(&self) -> &GameDefinition;

    fn utilities_at(&self, _t: u64, a: &JointAction) -> Vec<f64> {
        self.game().utilities(a)
    }

    fn potential_at(&self, _t: u64, a: &JointAction) -> Option<f64> {
        self.game().potential(a)
    }
}

impl Environment for GameDefinition {
    fn game(&self) -> &GameDefinition {
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub t: u64,
    pub epsilon: f64,
    pub actions: JointAction,
    pub utilities: Vec<f64>,
    pub potential: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeTrace {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub initial: JointAction,
    pub initial_utilities: Vec<f64>,
    pub steps: Vec<StepRecord>,
}

impl EpisodeTrace {
    pub fn final_actions(&self) -> &JointAction {
        self.steps
            .last()
            .map(|s| &s.actions)
            .unwrap_or(&self.initial)
    }
}

/// Independent stream per agent, derived from the episode seed.
pub fn agent_rng(seed: u64, agent: AgentId) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(agent.0 as u64);
    rng
}

/// Step-by-step episode driver. Decision times start at `t = 2`.
pub struct Episode<'e, E: Environment + ?Sized> {
    env: &'e E,
    algorithm: Algorithm,
    params: LearnerParams,
    memories: Vec<AgentMemory>,
    rngs: Vec<ChaCha8Rng>,
    previous: JointAction,
    current: JointAction,
    t: u64,
}

impl<'e, E: Environment + ?Sized> Episode<'e, E> {
    pub fn new(
        env: &'e E,
        algorithm: Algorithm,
        params: LearnerParams,
        seed: u64,
        initial: JointAction,
    ) -> Result<Self> {
        match (algorithm, params.epsilon) {
            (Algorithm::Pipip, EpsilonMode::Constant(_)) => {
                return Err(Error::Domain(
                    "PIPIP uses the decaying schedule; use PHPIP for constant epsilon".into(),
                ))
            }
            (Algorithm::Phpip, EpsilonMode::Decaying) => {
                return Err(Error::Domain("PHPIP needs a constant epsilon".into()))
            }
            _ => {}
        }
        let game = env.game();
        game.validate(&initial)?;
        let n = game.num_agents();
        let utilities = env.utilities_at(1, &initial);
        let memories = initial
            .iter()
            .map(|(agent, a)| AgentMemory::new(a, utilities[agent.0]))
            .collect();
        let rngs = (0..n).map(|i| agent_rng(seed, AgentId(i))).collect();
        Ok(Episode {
            env,
            algorithm,
            params,
            memories,
            rngs,
            previous: initial.clone(),
            current: initial,
            t: 2,
        })
    }

    /// Time index of the next decision.
    pub fn time(&self) -> u64 {
        self.t
    }

    pub fn current(&self) -> &JointAction {
        &self.current
    }

    pub fn previous(&self) -> &JointAction {
        &self.previous
    }

    pub fn memories(&self) -> &[AgentMemory] {
        &self.memories
    }

    /// One synchronous round: every agent decides from its memory, then
    /// utilities are evaluated at the new joint action.
    pub fn step(&mut self) -> Result<StepRecord> {
        let game = self.env.game();
        let n = game.num_agents();
        let epsilon = self.params.epsilon_at(self.t, n)?;
        let rule = self.algorithm.rule();
        let mut next = self.current.clone();
        for i in 0..n {
            let agent = AgentId(i);
            let memory = &self.memories[i];
            let restricted = game.constraints().set(agent, memory.recent);
            let action = step_with_rule(
                rule,
                agent,
                memory,
                restricted,
                epsilon,
                self.params.kappa,
                &mut self.rngs[i],
            )?;
            next.set(agent, action);
        }
        let utilities = self.env.utilities_at(self.t, &next);
        for (memory, (agent, action)) in self.memories.iter_mut().zip(next.iter()) {
            memory.record(action, utilities[agent.0]);
        }
        let record = StepRecord {
            t: self.t,
            epsilon,
            potential: self.env.potential_at(self.t, &next),
            actions: next.clone(),
            utilities,
        };
        self.previous = std::mem::replace(&mut self.current, next);
        self.t += 1;
        Ok(record)
    }
}

/// Runs `steps` synchronous decisions (times `2..=steps+1`).
pub fn run_episode<E: Environment + ?Sized>(
    env: &E,
    algorithm: Algorithm,
    params: LearnerParams,
    steps: usize,
    seed: u64,
    initial: JointAction,
) -> Result<EpisodeTrace> {
    if steps == 0 {
        return Err(Error::Domain("an episode needs at least one step".into()));
    }
    let initial_utilities = env.utilities_at(1, &initial);
    let mut episode = Episode::new(env, algorithm, params, seed, initial.clone())?;
    let records = (0..steps)
        .map(|_| episode.step())
        .collect::<Result<Vec<_>>>()?;
    Ok(EpisodeTrace {
        algorithm,
        seed,
        initial,
        initial_utilities,
        steps: records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::ConstraintMap;
    use crate::toys;

    fn ids(v: &[usize]) -> Vec<ActionId> {
        v.iter().map(|&a| ActionId(a)).collect()
    }

    #[test]
    fn exploration_rate_values() {
        let e = exploration_rate(2, 4, 8).unwrap();
        assert!((e - 0.980_929_8).abs() < 1e-6, "{e}");
        let e = exploration_rate(2, 1, 1).unwrap();
        assert!((e - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(exploration_rate(1, 1, 1).is_err());
        assert!(exploration_rate(2, 0, 1).is_err());
        assert!(exploration_rate(2, 1, 0).is_err());
    }

    #[test]
    fn exploration_rate_decreases() {
        let mut last = 1.0;
        for t in [2u64, 3, 10, 100, 10_000, 1_000_000_000] {
            let e = exploration_rate(t, 2, 3).unwrap();
            assert!(e < last && e > 0.0);
            last = e;
        }
        assert!(exploration_rate(u64::MAX, 1, 1).unwrap() < 1e-9);
    }

    #[test]
    fn diameter_of_complete_and_path() {
        let complete = GameDefinition::new(ConstraintMap::complete(&[4, 2]).unwrap(), |_, _| 0.0);
        assert_eq!(diameter(&complete).unwrap(), 1);
        assert_eq!(diameter(&toys::path_single_agent()).unwrap(), 2);
        let split = ConstraintMap::new(vec![vec![vec![0], vec![1]]]).unwrap();
        assert!(matches!(
            diameter(&GameDefinition::new(split, |_, _| 0.0)),
            Err(Error::Disconnected(_))
        ));
    }

    #[test]
    fn kappa_bounds() {
        assert!(validate_kappa(0.5, 9).is_ok());
        assert!(validate_kappa(0.05, 9).is_err());
        assert!(validate_kappa(0.125, 9).is_err());
        assert!(validate_kappa(0.13, 9).is_ok());
        assert!(validate_kappa(0.51, 9).is_err());
        // With three choices the interval is empty.
        assert!(validate_kappa(0.5, 3).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(LearnerParams::new(0.5, EpsilonMode::Constant(0.15), 8).is_ok());
        assert!(LearnerParams::new(0.5, EpsilonMode::Constant(0.6), 8).is_err());
        assert!(LearnerParams::new(0.0, EpsilonMode::Decaying, 8).is_err());
        assert!(LearnerParams::new(0.5, EpsilonMode::Decaying, 0).is_err());
    }

    #[test]
    fn memory_initialization_and_shift() {
        let mut m = AgentMemory::new(ActionId(3), 0.4);
        assert_eq!(
            (m.recent, m.older, m.delta),
            (ActionId(3), ActionId(3), 0.0)
        );
        m.record(ActionId(5), 0.1);
        assert_eq!((m.recent, m.older), (ActionId(5), ActionId(3)));
        assert!((m.delta - 0.3).abs() < 1e-15);
        assert!(m.dropped());
    }

    #[test]
    fn irrational_branch_values() {
        let m = AgentMemory::from_history(ActionId(0), 0.7, ActionId(1), 0.2);
        let b = branch_probabilities(AgentId(0), &m, 0.15, 0.5, Rule::PartiallyIrrational).unwrap();
        assert!((b.explore - 0.15).abs() < 1e-15);
        assert!((b.stay - 0.164_602).abs() < 1e-5, "{}", b.stay);
        assert!((b.revert - 0.685_398).abs() < 1e-5, "{}", b.revert);
        assert!((b.total() - 1.0).abs() < 1e-15);
        let d = branch_probabilities(AgentId(0), &m, 0.15, 0.5, Rule::Disl).unwrap();
        assert_eq!(d.stay, 0.0);
        assert!((d.revert - 0.85).abs() < 1e-15);
    }

    #[test]
    fn large_drop_is_fatal() {
        let m = AgentMemory::from_history(ActionId(0), 1.2, ActionId(1), 0.1);
        assert!(matches!(
            branch_probabilities(AgentId(2), &m, 0.1, 0.5, Rule::PartiallyIrrational),
            Err(Error::UtilityStepTooLarge {
                agent: AgentId(2),
                ..
            })
        ));
    }

    #[test]
    fn forced_non_exploring_draws() {
        let restricted = ids(&[0, 1, 2, 3]);
        let up = AgentMemory::from_history(ActionId(0), 0.1, ActionId(1), 0.3);
        let b = branch_probabilities(AgentId(0), &up, 0.2, 0.5, Rule::PartiallyIrrational).unwrap();
        let e = exploration_set(&up, &restricted);
        assert_eq!(
            decide(&up, &b, &e, 0.999_999, |_| unreachable!()),
            ActionId(1)
        );

        let down = AgentMemory::from_history(ActionId(0), 0.3, ActionId(1), 0.1);
        let b = branch_probabilities(AgentId(0), &down, 0.2, 0.5, Rule::Disl).unwrap();
        let e = exploration_set(&down, &restricted);
        for u in [0.2, 0.5, 0.9999] {
            assert_eq!(decide(&down, &b, &e, u, |_| unreachable!()), ActionId(0));
        }
        assert_eq!(e, ids(&[2, 3]));
        assert_eq!(decide(&down, &b, &e, 0.1, |len| len - 1), ActionId(3));
    }

    #[test]
    fn exploration_set_fallback_for_two_choices() {
        let down = AgentMemory::from_history(ActionId(0), 0.3, ActionId(1), 0.1);
        assert_eq!(exploration_set(&down, &ids(&[0, 1])), ids(&[0]));
        let up = AgentMemory::from_history(ActionId(0), 0.1, ActionId(1), 0.3);
        assert_eq!(exploration_set(&up, &ids(&[0, 1])), ids(&[0]));
        let lonely = AgentMemory::new(ActionId(0), 0.0);
        let mut rng = agent_rng(1, AgentId(0));
        assert!(matches!(
            pipip_step(AgentId(0), &lonely, &ids(&[0]), 0.5, 0.5, &mut rng),
            Err(Error::EmptyExplorationSet { .. })
        ));
    }

    #[test]
    fn constant_utilities_first_step_is_non_dropped() {
        let game = GameDefinition::new(ConstraintMap::complete(&[3, 3]).unwrap(), |_, _| 0.25);
        let params = LearnerParams::new(0.5, EpsilonMode::Constant(0.2), 1).unwrap();
        let mut ep = Episode::new(
            &game,
            Algorithm::Phpip,
            params,
            7,
            JointAction::from_indices(&[1, 2]),
        )
        .unwrap();
        assert!(ep.memories().iter().all(|m| !m.dropped() && m.delta == 0.0));
        let rec = ep.step().unwrap();
        assert_eq!(rec.t, 2);
        assert_eq!(ep.time(), 3);
    }

    #[test]
    fn episode_is_deterministic_per_seed() {
        let game = toys::coordination_3x3();
        let params = LearnerParams::new(0.5, EpsilonMode::Constant(0.1), 1).unwrap();
        let start = JointAction::from_indices(&[0, 1]);
        let a = run_episode(&game, Algorithm::Phpip, params, 500, 42, start.clone()).unwrap();
        let b = run_episode(&game, Algorithm::Phpip, params, 500, 42, start.clone()).unwrap();
        let c = run_episode(&game, Algorithm::Phpip, params, 500, 43, start).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.steps, c.steps);
        assert_eq!(a.steps.len(), 500);
        assert_eq!(a.steps.first().unwrap().t, 2);
        assert_eq!(a.steps.last().unwrap().t, 501);
    }

    #[test]
    fn algorithm_and_schedule_must_agree() {
        let game = toys::coordination_3x3();
        let constant = LearnerParams::new(0.5, EpsilonMode::Constant(0.1), 1).unwrap();
        let decaying = LearnerParams::new(0.5, EpsilonMode::Decaying, 1).unwrap();
        let a = JointAction::from_indices(&[0, 0]);
        assert!(run_episode(&game, Algorithm::Pipip, constant, 1, 0, a.clone()).is_err());
        assert!(run_episode(&game, Algorithm::Phpip, decaying, 1, 0, a.clone()).is_err());
        assert!(run_episode(&game, Algorithm::Pipip, decaying, 3, 0, a.clone()).is_ok());
        assert!(run_episode(&game, Algorithm::Disl, decaying, 3, 0, a).is_ok());
    }

    #[test]
    fn pipip_first_records_use_decaying_rate() {
        let game = toys::coordination_3x3();
        let params = LearnerParams::new(0.5, EpsilonMode::Decaying, 1).unwrap();
        let trace = run_episode(
            &game,
            Algorithm::Pipip,
            params,
            2,
            3,
            JointAction::from_indices(&[0, 0]),
        )
        .unwrap();
        assert_eq!(trace.steps[0].epsilon, exploration_rate(2, 2, 1).unwrap());
        assert_eq!(trace.steps[1].epsilon, exploration_rate(3, 2, 1).unwrap());
    }
}
