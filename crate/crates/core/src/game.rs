//! Constrained strategic games.
//!
//! A game is a set of agents, a finite action set per agent, a constraint map
//! `R_i(a_i)` giving the actions reachable from `a_i` in one step, a utility
//! oracle over joint actions and, optionally, a potential oracle. The checks
//! in this module sweep the standing hypotheses of the learning theory
//! (reversible, connected constraint graphs with at least three choices,
//! single-deviation utility changes below one, and the potential identity)
//! and report witnesses instead of failing.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default bound on the number of joint actions a brute-force sweep may visit.
pub const DEFAULT_ENUMERATION_GUARD: u128 = 1_000_000;

/// Absolute tolerance of the potential identity check.
pub const POTENTIAL_TOLERANCE: f64 = 1e-9;

/// Tolerance used when comparing utilities or potentials for ties.
pub const TIE_TOLERANCE: f64 = 1e-12;

const MAX_WITNESSES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentId(pub usize);

impl AgentId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionId(pub usize);

impl ActionId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

/// One action per agent, in agent order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JointAction(Vec<ActionId>);

impl JointAction {
    pub fn new(actions: Vec<ActionId>) -> Self {
        JointAction(actions)
    }

    pub fn from_indices(indices: &[usize]) -> Self {
        JointAction(indices.iter().map(|&a| ActionId(a)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn get(&self, agent: AgentId) -> ActionId {
        self.0[agent.0]
    }

    #[inline]
    pub fn set(&mut self, agent: AgentId, action: ActionId) {
        self.0[agent.0] = action;
    }

    /// Copy of `self` with agent `agent` switched to `action`.
    pub fn with(&self, agent: AgentId, action: ActionId) -> Self {
        let mut next = self.clone();
        next.set(agent, action);
        next
    }

    pub fn actions(&self) -> &[ActionId] {
        &self.0
    }

    pub fn indices(&self) -> Vec<usize> {
        self.0.iter().map(|a| a.0).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (AgentId, ActionId)> + '_ {
        self.0.iter().enumerate().map(|(i, &a)| (AgentId(i), a))
    }
}

impl fmt::Display for JointAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, a) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", a.0)?;
        }
        write!(f, ")")
    }
}

/// `R_i(a_i)` for every agent and action. Sets are stored sorted and
/// deduplicated; `a_i` itself may or may not be a member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintMap {
    sets: Vec<Vec<Vec<ActionId>>>,
}

impl ConstraintMap {
    /// `sets[i][a]` lists the actions agent `i` may take after taking `a`.
    pub fn new(sets: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::InvalidGame("a game needs at least one agent".into()));
        }
        let mut out = Vec::with_capacity(sets.len());
        for (i, agent_sets) in sets.into_iter().enumerate() {
            let count = agent_sets.len();
            if count == 0 {
                return Err(Error::InvalidGame(format!("agent {i} has no actions")));
            }
            let mut agent_out = Vec::with_capacity(count);
            for mut set in agent_sets {
                set.sort_unstable();
                set.dedup();
                if let Some(&bad) = set.iter().find(|&&b| b >= count) {
                    return Err(Error::ActionOutOfRange {
                        agent: AgentId(i),
                        action: ActionId(bad),
                        count,
                    });
                }
                agent_out.push(set.into_iter().map(ActionId).collect());
            }
            out.push(agent_out);
        }
        Ok(ConstraintMap { sets: out })
    }

    /// Unconstrained play: `R_i(a) = A_i` for every `a`.
    pub fn complete(action_counts: &[usize]) -> Result<Self> {
        Self::new(
            action_counts
                .iter()
                .map(|&m| (0..m).map(|_| (0..m).collect()).collect())
                .collect(),
        )
    }

    pub fn num_agents(&self) -> usize {
        self.sets.len()
    }

    pub fn num_actions(&self, agent: AgentId) -> usize {
        self.sets[agent.0].len()
    }

    pub fn get(&self, agent: AgentId, action: ActionId) -> Result<&[ActionId]> {
        let agent_sets = self
            .sets
            .get(agent.0)
            .ok_or(Error::AgentOutOfRange(agent, self.sets.len()))?;
        agent_sets
            .get(action.0)
            .map(Vec::as_slice)
            .ok_or(Error::ActionOutOfRange {
                agent,
                action,
                count: agent_sets.len(),
            })
    }

    /// Unchecked lookup for hot loops; indices must already be validated.
    #[inline]
    pub fn set(&self, agent: AgentId, action: ActionId) -> &[ActionId] {
        &self.sets[agent.0][action.0]
    }

    /// `C = max_i max_{a_i} |R_i(a_i)|`.
    pub fn max_choices(&self) -> usize {
        self.sets
            .iter()
            .flat_map(|s| s.iter().map(Vec::len))
            .max()
            .unwrap_or(0)
    }

    pub fn contains(&self, agent: AgentId, from: ActionId, to: ActionId) -> bool {
        self.set(agent, from).binary_search(&to).is_ok()
    }
}

pub type UtilityFn = Arc<dyn Fn(AgentId, &JointAction) -> f64 + Send + Sync>;
pub type PotentialFn = Arc<dyn Fn(&JointAction) -> f64 + Send + Sync>;

/// A constrained strategic game with an optional potential function.
#[derive(Clone)]
pub struct GameDefinition {
    constraints: ConstraintMap,
    utility: UtilityFn,
    potential: Option<PotentialFn>,
}

impl fmt::Debug for GameDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GameDefinition")
            .field("constraints", &self.constraints)
            .field("has_potential", &self.potential.is_some())
            .finish()
    }
}

impl GameDefinition {
    pub fn new<U>(constraints: ConstraintMap, utility: U) -> Self
    where
        U: Fn(AgentId, &JointAction) -> f64 + Send + Sync + 'static,
    {
        GameDefinition {
            constraints,
            utility: Arc::new(utility),
            potential: None,
        }
    }

    pub fn with_potential<P>(mut self, potential: P) -> Self
    where
        P: Fn(&JointAction) -> f64 + Send + Sync + 'static,
    {
        self.potential = Some(Arc::new(potential));
        self
    }

    /// Every agent's utility is the potential itself.
    pub fn identical_interest<P>(constraints: ConstraintMap, potential: P) -> Self
    where
        P: Fn(&JointAction) -> f64 + Send + Sync + 'static,
    {
        let potential: PotentialFn = Arc::new(potential);
        let shared = potential.clone();
        GameDefinition {
            constraints,
            utility: Arc::new(move |_, a| shared(a)),
            potential: Some(potential),
        }
    }

    /// Affine transform `c * U + b` (and likewise for the potential).
    pub fn transformed(&self, scale: f64, offset: f64) -> Self {
        let u = self.utility.clone();
        GameDefinition {
            constraints: self.constraints.clone(),
            utility: Arc::new(move |i, a| scale * u(i, a) + offset),
            potential: self
                .potential
                .clone()
                .map(|p| -> PotentialFn { Arc::new(move |a: &JointAction| scale * p(a) + offset) }),
        }
    }

    pub fn constraints(&self) -> &ConstraintMap {
        &self.constraints
    }

    pub fn num_agents(&self) -> usize {
        self.constraints.num_agents()
    }

    pub fn num_actions(&self, agent: AgentId) -> usize {
        self.constraints.num_actions(agent)
    }

    pub fn action_counts(&self) -> Vec<usize> {
        (0..self.num_agents())
            .map(|i| self.num_actions(AgentId(i)))
            .collect()
    }

    /// `R_i(a_i)` exactly as stored.
    pub fn restricted_actions(&self, agent: AgentId, action: ActionId) -> Result<&[ActionId]> {
        self.constraints.get(agent, action)
    }

    #[inline]
    pub fn utility(&self, agent: AgentId, a: &JointAction) -> f64 {
        (self.utility)(agent, a)
    }

    pub fn utilities(&self, a: &JointAction) -> Vec<f64> {
        (0..self.num_agents())
            .map(|i| self.utility(AgentId(i), a))
            .collect()
    }

    pub fn has_potential(&self) -> bool {
        self.potential.is_some()
    }

    pub fn potential(&self, a: &JointAction) -> Option<f64> {
        self.potential.as_ref().map(|p| p(a))
    }

    pub fn validate(&self, a: &JointAction) -> Result<()> {
        if a.len() != self.num_agents() {
            return Err(Error::JointActionLength {
                expected: self.num_agents(),
                got: a.len(),
            });
        }
        for (agent, action) in a.iter() {
            let count = self.num_actions(agent);
            if action.0 >= count {
                return Err(Error::ActionOutOfRange {
                    agent,
                    action,
                    count,
                });
            }
        }
        Ok(())
    }

    /// `|A| = prod_i |A_i|`, saturating.
    pub fn joint_action_count(&self) -> u128 {
        self.action_counts()
            .iter()
            .fold(1u128, |acc, &m| acc.saturating_mul(m as u128))
    }

    /// Iterate over all of `A` in lexicographic order, refusing if `|A| > guard`.
    pub fn joint_actions(&self, guard: u128) -> Result<JointActions> {
        let size = self.joint_action_count();
        if size > guard {
            return Err(Error::GuardExceeded { size, guard });
        }
        Ok(JointActions::new(self.action_counts()))
    }
}

/// Mixed-radix odometer over a product of finite sets.
pub struct JointActions {
    radices: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl JointActions {
    pub fn new(radices: Vec<usize>) -> Self {
        let next = if radices.iter().all(|&m| m > 0) {
            Some(vec![0; radices.len()])
        } else {
            None
        };
        JointActions { radices, next }
    }
}

impl Iterator for JointActions {
    type Item = JointAction;

    fn next(&mut self) -> Option<JointAction> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut k = succ.len();
        let mut carried = true;
        while k > 0 && carried {
            k -= 1;
            succ[k] += 1;
            if succ[k] == self.radices[k] {
                succ[k] = 0;
            } else {
                carried = false;
            }
        }
        if !carried {
            self.next = Some(succ);
        }
        Some(JointAction::from_indices(&current))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Clause {
    /// `a' ∈ R_i(a) ⇔ a ∈ R_i(a')`.
    Reversibility,
    /// The constraint graph of every agent is strongly connected.
    Feasibility,
    /// `|R_i(a_i)| ≥ 3`.
    MinChoices,
    /// Single constrained deviations change the deviator's utility by less than one.
    BoundedDeviation,
    /// Utility differences equal potential differences on constrained deviations.
    PotentialIdentity,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub clause: Clause,
    pub agent: AgentId,
    pub from: ActionId,
    pub to: Option<ActionId>,
    pub profile: Option<JointAction>,
    pub value: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AssumptionReport {
    pub clauses: Vec<(Clause, bool)>,
    pub witnesses: Vec<Witness>,
    /// Largest utility change (assumption 2) or identity residual (potential check).
    pub max_deviation: f64,
}

impl AssumptionReport {
    pub fn passed(&self) -> bool {
        self.clauses.iter().all(|&(_, ok)| ok)
    }

    pub fn clause_passed(&self, clause: Clause) -> Option<bool> {
        self.clauses
            .iter()
            .find(|(c, _)| *c == clause)
            .map(|&(_, ok)| ok)
    }

    pub fn witnesses_for(&self, clause: Clause) -> impl Iterator<Item = &Witness> {
        self.witnesses.iter().filter(move |w| w.clause == clause)
    }

    fn push(&mut self, w: Witness) {
        if self.witnesses_for(w.clause).count() < MAX_WITNESSES {
            self.witnesses.push(w);
        }
    }
}

/// Reversibility, strong connectivity and the three-choice minimum of every
/// constraint graph.
pub fn check_assumption1(game: &GameDefinition) -> AssumptionReport {
    let cm = game.constraints();
    let mut report = AssumptionReport::default();
    let (mut reversible, mut connected, mut enough) = (true, true, true);

    for i in 0..cm.num_agents() {
        let agent = AgentId(i);
        let m = cm.num_actions(agent);
        for a in 0..m {
            let from = ActionId(a);
            let set = cm.set(agent, from);
            if set.len() < 3 {
                enough = false;
                report.push(Witness {
                    clause: Clause::MinChoices,
                    agent,
                    from,
                    to: None,
                    profile: None,
                    value: Some(set.len() as f64),
                });
            }
            for &to in set {
                if !cm.contains(agent, to, from) {
                    reversible = false;
                    report.push(Witness {
                        clause: Clause::Reversibility,
                        agent,
                        from,
                        to: Some(to),
                        profile: None,
                        value: None,
                    });
                }
            }
        }

        let forward = reachable(m, |a| {
            cm.set(agent, ActionId(a)).iter().map(|b| b.0).collect()
        });
        let mut reverse_adj = vec![Vec::new(); m];
        for a in 0..m {
            for b in cm.set(agent, ActionId(a)) {
                reverse_adj[b.0].push(a);
            }
        }
        let backward = reachable(m, |a| reverse_adj[a].clone());
        if let Some(missing) = (0..m).find(|&b| !forward[b] || !backward[b]) {
            connected = false;
            report.push(Witness {
                clause: Clause::Feasibility,
                agent,
                from: ActionId(0),
                to: Some(ActionId(missing)),
                profile: None,
                value: None,
            });
        }
    }

    report.clauses = vec![
        (Clause::Reversibility, reversible),
        (Clause::Feasibility, connected),
        (Clause::MinChoices, enough),
    ];
    report
}

fn reachable(m: usize, neighbours: impl Fn(usize) -> Vec<usize>) -> Vec<bool> {
    let mut seen = vec![false; m];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(a) = queue.pop_front() {
        for b in neighbours(a) {
            if !seen[b] {
                seen[b] = true;
                queue.push_back(b);
            }
        }
    }
    seen
}

/// Visits every constrained single-agent deviation `(a -> a')` with
/// `a'_i ∈ R_i(a_i)`, `a'_i != a_i`.
fn for_each_deviation(
    game: &GameDefinition,
    guard: u128,
    mut visit: impl FnMut(AgentId, &JointAction, &JointAction),
) -> Result<()> {
    for a in game.joint_actions(guard)? {
        for (agent, ai) in a.iter() {
            for &alt in game.constraints().set(agent, ai) {
                if alt != ai {
                    let dev = a.with(agent, alt);
                    visit(agent, &a, &dev);
                }
            }
        }
    }
    Ok(())
}

/// Sweeps `U_i(a') - U_i(a) < 1` over all constrained single deviations.
pub fn check_assumption2(game: &GameDefinition) -> Result<AssumptionReport> {
    check_assumption2_with_guard(game, DEFAULT_ENUMERATION_GUARD)
}

pub fn check_assumption2_with_guard(
    game: &GameDefinition,
    guard: u128,
) -> Result<AssumptionReport> {
    let mut report = AssumptionReport::default();
    let mut ok = true;
    for_each_deviation(game, guard, |agent, a, dev| {
        let diff = game.utility(agent, dev) - game.utility(agent, a);
        report.max_deviation = report.max_deviation.max(diff.abs());
        if diff >= 1.0 || !diff.is_finite() {
            ok = false;
            report.push(Witness {
                clause: Clause::BoundedDeviation,
                agent,
                from: a.get(agent),
                to: Some(dev.get(agent)),
                profile: Some(a.clone()),
                value: Some(diff),
            });
        }
    })?;
    report.clauses = vec![(Clause::BoundedDeviation, ok)];
    Ok(report)
}

/// Checks the potential identity on all constrained single deviations to
/// [`POTENTIAL_TOLERANCE`]; `max_deviation` carries the largest residual.
pub fn verify_potential_identity(game: &GameDefinition) -> Result<AssumptionReport> {
    verify_potential_identity_with_guard(game, DEFAULT_ENUMERATION_GUARD)
}

pub fn verify_potential_identity_with_guard(
    game: &GameDefinition,
    guard: u128,
) -> Result<AssumptionReport> {
    if !game.has_potential() {
        return Err(Error::MissingPotential);
    }
    let mut report = AssumptionReport::default();
    let mut ok = true;
    for_each_deviation(game, guard, |agent, a, dev| {
        let du = game.utility(agent, dev) - game.utility(agent, a);
        let dphi = game.potential(dev).unwrap() - game.potential(a).unwrap();
        let residual = (du - dphi).abs();
        report.max_deviation = report.max_deviation.max(residual);
        if residual > POTENTIAL_TOLERANCE || !residual.is_finite() {
            ok = false;
            report.push(Witness {
                clause: Clause::PotentialIdentity,
                agent,
                from: a.get(agent),
                to: Some(dev.get(agent)),
                profile: Some(a.clone()),
                value: Some(residual),
            });
        }
    })?;
    report.clauses = vec![(Clause::PotentialIdentity, ok)];
    Ok(report)
}

/// True when no agent has a strictly better action inside `R_i(a_i)`.
pub fn is_constrained_nash(game: &GameDefinition, a: &JointAction) -> bool {
    a.iter().all(|(agent, ai)| {
        let current = game.utility(agent, a);
        game.constraints()
            .set(agent, ai)
            .iter()
            .filter(|&&alt| alt != ai)
            .all(|&alt| game.utility(agent, &a.with(agent, alt)) <= current + TIE_TOLERANCE)
    })
}

/// All constrained pure Nash equilibria, in lexicographic order. Ties count.
pub fn enumerate_nash(game: &GameDefinition) -> Result<Vec<JointAction>> {
    enumerate_nash_with_guard(game, DEFAULT_ENUMERATION_GUARD)
}

pub fn enumerate_nash_with_guard(game: &GameDefinition, guard: u128) -> Result<Vec<JointAction>> {
    Ok(game
        .joint_actions(guard)?
        .filter(|a| is_constrained_nash(game, a))
        .collect())
}

/// All maximizers of the potential (the optimal Nash equilibria).
///
/// Fails with [`Error::NotPotentialGame`] if some maximizer is not a
/// constrained Nash equilibrium, which cannot happen for a potential game.
pub fn optimal_nash(game: &GameDefinition) -> Result<Vec<JointAction>> {
    optimal_nash_with_guard(game, DEFAULT_ENUMERATION_GUARD)
}

pub fn optimal_nash_with_guard(game: &GameDefinition, guard: u128) -> Result<Vec<JointAction>> {
    if !game.has_potential() {
        return Err(Error::MissingPotential);
    }
    let mut best = f64::NEG_INFINITY;
    let mut argmax = Vec::new();
    for a in game.joint_actions(guard)? {
        let phi = game.potential(&a).unwrap();
        if phi > best + TIE_TOLERANCE {
            best = phi;
            argmax.clear();
            argmax.push(a);
        } else if (phi - best).abs() <= TIE_TOLERANCE {
            argmax.push(a);
        }
    }
    // Drop entries admitted under an earlier, slightly lower running maximum.
    argmax.retain(|a| game.potential(a).unwrap() >= best - TIE_TOLERANCE);
    if let Some(bad) = argmax.iter().find(|a| !is_constrained_nash(game, a)) {
        return Err(Error::NotPotentialGame(bad.indices()));
    }
    Ok(argmax)
}
