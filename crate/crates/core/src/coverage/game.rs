use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::world::{CoverageWorld, Point};
use crate::error::{Error, Result};
use crate::game::{
    check_assumption1, ActionId, AgentId, Clause, ConstraintMap, GameDefinition, JointAction,
    DEFAULT_ENUMERATION_GUARD, POTENTIAL_TOLERANCE,
};
use crate::learning::Environment;

/// Profiles sampled when a game is too large to sweep.
pub const SAMPLED_PROFILES: usize = 10_000;
const SAMPLE_SEED: u64 = 0x5eed_c0de;

/// `1 + 1/2 + ... + 1/n`.
fn harmonic(n: usize) -> f64 {
    (1..=n).map(|l| 1.0 / l as f64).sum()
}

struct Inner {
    world: CoverageWorld,
    scale: f64,
    agents: usize,
    cells: Vec<usize>,
    sensing: Vec<Vec<usize>>,
    /// Scaled density per cell for static fields.
    frozen: Option<Vec<f64>>,
}

impl Inner {
    fn weight(&self, q: usize, t: u64) -> f64 {
        match &self.frozen {
            Some(w) => w[q],
            None => self.scale * self.world.density().raw_at(self.world.grid(), q, t),
        }
    }

    fn counts(&self, a: &JointAction) -> Vec<usize> {
        let mut n = vec![0usize; self.world.grid().cell_count()];
        for (_, action) in a.iter() {
            for &q in &self.sensing[action.0] {
                n[q] += 1;
            }
        }
        n
    }

    fn potential(&self, a: &JointAction, t: u64) -> f64 {
        self.counts(a)
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(q, &n)| self.weight(q, t) * harmonic(n))
            .sum()
    }

    fn utility_from(&self, counts: &[usize], action: ActionId, t: u64) -> f64 {
        self.sensing[action.0]
            .iter()
            .map(|&q| self.weight(q, t) / counts[q] as f64)
            .sum()
    }

    fn utilities(&self, a: &JointAction, t: u64) -> Vec<f64> {
        let counts = self.counts(a);
        a.iter()
            .map(|(_, x)| self.utility_from(&counts, x, t))
            .collect()
    }
}

/// The coverage game of `agents` identical sensors on a [`CoverageWorld`].
///
/// Action `k` of every agent is the `k`-th non-obstacle cell. Oracles of the
/// wrapped [`GameDefinition`] evaluate the density at `t = 0`; use the
/// [`Environment`] methods for time-varying fields.
#[derive(Clone)]
pub struct CoverageGame {
    inner: Arc<Inner>,
    game: GameDefinition,
}

impl std::fmt::Debug for CoverageGame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CoverageGame")
            .field("agents", &self.inner.agents)
            .field("actions", &self.inner.cells.len())
            .field("scale", &self.inner.scale)
            .finish()
    }
}

/// Builds and validates the game: connectivity and at least three choices
/// everywhere, then bounded deviations and the potential identity.
pub fn build_coverage_game(world: &CoverageWorld, agents: usize) -> Result<CoverageGame> {
    let game = assemble(world, agents)?;
    let report = check_assumption1(game.game());
    if !report.passed() {
        if let Some(w) = report.witnesses_for(Clause::Feasibility).next() {
            return Err(Error::Disconnected(w.agent));
        }
        let w = report
            .witnesses
            .first()
            .expect("failed report has a witness");
        return Err(Error::InvalidGame(format!(
            "mobility constraints violate {:?} at agent {} action {}",
            w.clause, w.agent.0, w.from.0
        )));
    }
    game.check_oracles()?;
    Ok(game)
}

/// Builds without any validation.
pub fn assemble(world: &CoverageWorld, agents: usize) -> Result<CoverageGame> {
    if agents == 0 {
        return Err(Error::Domain(
            "coverage game needs at least one agent".into(),
        ));
    }
    let grid = world.grid();
    let cells = world.action_cells();
    if cells.is_empty() {
        return Err(Error::InvalidGame("every cell is an obstacle".into()));
    }
    let mut action_of = vec![None; grid.cell_count()];
    for (k, &c) in cells.iter().enumerate() {
        action_of[c] = Some(k);
    }
    let moves: Vec<Vec<usize>> = cells
        .iter()
        .map(|&c| {
            grid.king_neighbourhood(c)
                .into_iter()
                .filter_map(|q| action_of[q])
                .collect()
        })
        .collect();
    let constraints = ConstraintMap::new(vec![moves; agents])?;
    let scale = world.scale();
    let frozen = (!world.density().is_time_varying()).then(|| {
        (0..grid.cell_count())
            .map(|q| scale * world.density().raw_at(grid, q, 0))
            .collect()
    });
    let inner = Arc::new(Inner {
        world: world.clone(),
        scale,
        agents,
        sensing: cells.iter().map(|&c| world.sensing_set(c)).collect(),
        cells,
        frozen,
    });
    let (u, p) = (inner.clone(), inner.clone());
    let game = GameDefinition::new(constraints, move |agent, a| {
        u.utility_from(&u.counts(a), a.get(agent), 0)
    })
    .with_potential(move |a| p.potential(a, 0));
    Ok(CoverageGame { inner, game })
}

impl CoverageGame {
    pub fn game(&self) -> &GameDefinition {
        &self.game
    }

    pub fn world(&self) -> &CoverageWorld {
        &self.inner.world
    }

    pub fn scale(&self) -> f64 {
        self.inner.scale
    }

    pub fn num_agents(&self) -> usize {
        self.inner.agents
    }

    pub fn num_actions(&self) -> usize {
        self.inner.cells.len()
    }

    pub fn cell_of(&self, action: ActionId) -> usize {
        self.inner.cells[action.0]
    }

    pub fn action_at_cell(&self, cell: usize) -> Option<ActionId> {
        self.inner
            .cells
            .iter()
            .position(|&c| c == cell)
            .map(ActionId)
    }

    pub fn action_at(&self, p: Point) -> Option<ActionId> {
        self.world()
            .grid()
            .locate(p)
            .and_then(|c| self.action_at_cell(c))
    }

    /// Joint action placing agent `i` on the cell centred at `points[i]`.
    pub fn joint_action_at(&self, points: &[Point]) -> Result<JointAction> {
        if points.len() != self.num_agents() {
            return Err(Error::JointActionLength {
                expected: self.num_agents(),
                got: points.len(),
            });
        }
        points
            .iter()
            .map(|&p| {
                self.action_at(p).ok_or_else(|| {
                    Error::Domain(format!("({}, {}) is not an admissible cell", p[0], p[1]))
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(JointAction::new)
    }

    pub fn sensing_set(&self, action: ActionId) -> &[usize] {
        &self.inner.sensing[action.0]
    }

    /// `n_q(a)`.
    pub fn coverage_count(&self, a: &JointAction, q: usize) -> usize {
        a.iter()
            .filter(|(_, x)| self.sensing_set(*x).contains(&q))
            .count()
    }

    pub fn density_at(&self, q: usize, t: u64) -> f64 {
        self.inner.weight(q, t)
    }

    pub fn potential(&self, a: &JointAction, t: u64) -> f64 {
        self.inner.potential(a, t)
    }

    pub fn utility(&self, agent: AgentId, a: &JointAction, t: u64) -> f64 {
        self.inner
            .utility_from(&self.inner.counts(a), a.get(agent), t)
    }

    pub fn utilities(&self, a: &JointAction, t: u64) -> Vec<f64> {
        self.inner.utilities(a, t)
    }

    /// Bounded deviations and the potential identity, exhaustively when the
    /// profile count is within the enumeration guard, otherwise on a fixed
    /// random sample. Time-varying fields are checked at a few times.
    pub fn check_oracles(&self) -> Result<()> {
        let times: Vec<u64> = if self.world().density().is_time_varying() {
            vec![0, 400, 500, 600, 700]
        } else {
            vec![0]
        };
        let profiles: Box<dyn Iterator<Item = JointAction>> =
            if self.game.joint_action_count() <= DEFAULT_ENUMERATION_GUARD {
                Box::new(self.game.joint_actions(DEFAULT_ENUMERATION_GUARD)?)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
                let (n, m) = (self.num_agents(), self.num_actions());
                Box::new((0..SAMPLED_PROFILES).map(move |_| {
                    JointAction::new((0..n).map(|_| ActionId(rng.random_range(0..m))).collect())
                }))
            };
        for a in profiles {
            for &t in &times {
                self.check_profile(&a, t)?;
            }
        }
        Ok(())
    }

    fn check_profile(&self, a: &JointAction, t: u64) -> Result<()> {
        let u = self.utilities(a, t);
        let phi = self.potential(a, t);
        for (agent, x) in a.iter() {
            for &y in self.game.constraints().set(agent, x) {
                if y == x {
                    continue;
                }
                let b = a.with(agent, y);
                let du = self.utility(agent, &b, t) - u[agent.0];
                let dphi = self.potential(&b, t) - phi;
                if du.abs() >= 1.0 {
                    return Err(Error::UtilityStepTooLarge {
                        agent,
                        delta: du.abs(),
                    });
                }
                if (du - dphi).abs() > POTENTIAL_TOLERANCE {
                    return Err(Error::NotPotentialGame(a.indices()));
                }
            }
        }
        Ok(())
    }

    /// Number of unordered placements of the agents, `C(m + n - 1, n)`.
    pub fn placement_count(&self) -> u128 {
        let (m, n) = (self.num_actions() as u128, self.num_agents() as u128);
        (1..=n).fold(1u128, |acc, k| acc.saturating_mul(m + k - 1) / k)
    }

    /// Exact `max_a φ_t(a)` over unordered placements (agents are
    /// interchangeable), with one maximizer.
    pub fn exact_optimum(&self, t: u64) -> Result<(f64, JointAction)> {
        let size = self.placement_count();
        if size > DEFAULT_ENUMERATION_GUARD {
            return Err(Error::GuardExceeded {
                size,
                guard: DEFAULT_ENUMERATION_GUARD,
            });
        }
        let weights: Vec<f64> = (0..self.world().grid().cell_count())
            .map(|q| self.density_at(q, t))
            .collect();
        let mut search = Placement {
            sensing: &self.inner.sensing,
            weights: &weights,
            counts: vec![0; weights.len()],
            chosen: Vec::with_capacity(self.num_agents()),
            best: f64::NEG_INFINITY,
            best_at: Vec::new(),
        };
        search.run(0, self.num_agents(), 0.0);
        Ok((
            search.best,
            JointAction::new(search.best_at.into_iter().map(ActionId).collect()),
        ))
    }

    /// Sequential best-gain placement followed by best-response sweeps
    /// until no single move improves `φ_t`. A lower bound on the optimum.
    pub fn greedy_optimum(&self, t: u64) -> (f64, JointAction) {
        let n = self.num_agents();
        let m = self.num_actions();
        let mut placed: Vec<ActionId> = Vec::with_capacity(n);
        for _ in 0..n {
            let mut best = (f64::NEG_INFINITY, ActionId(0));
            for k in 0..m {
                let mut trial = placed.clone();
                trial.push(ActionId(k));
                let v = self.partial_potential(&trial, t);
                if v > best.0 {
                    best = (v, ActionId(k));
                }
            }
            placed.push(best.1);
        }
        let mut a = JointAction::new(placed);
        let mut value = self.potential(&a, t);
        loop {
            let mut improved = false;
            for i in 0..n {
                for k in 0..m {
                    let b = a.with(AgentId(i), ActionId(k));
                    let v = self.potential(&b, t);
                    if v > value + 1e-12 {
                        a = b;
                        value = v;
                        improved = true;
                    }
                }
            }
            if !improved {
                return (value, a);
            }
        }
    }

    fn partial_potential(&self, placed: &[ActionId], t: u64) -> f64 {
        self.inner.potential(&JointAction::new(placed.to_vec()), t)
    }
}

struct Placement<'a> {
    sensing: &'a [Vec<usize>],
    weights: &'a [f64],
    counts: Vec<usize>,
    chosen: Vec<usize>,
    best: f64,
    best_at: Vec<usize>,
}

impl Placement<'_> {
    /// Adds agents at nondecreasing action indices; adding a sensor at
    /// a cell raises `φ` by `Σ_q W(q) / (n_q + 1)` over its footprint.
    fn run(&mut self, from: usize, left: usize, value: f64) {
        if left == 0 {
            if value > self.best {
                self.best = value;
                self.best_at = self.chosen.clone();
            }
            return;
        }
        for k in from..self.sensing.len() {
            let gain: f64 = self.sensing[k]
                .iter()
                .map(|&q| self.weights[q] / (self.counts[q] + 1) as f64)
                .sum();
            for &q in &self.sensing[k] {
                self.counts[q] += 1;
            }
            self.chosen.push(k);
            self.run(k, left - 1, value + gain);
            self.chosen.pop();
            for &q in &self.sensing[k] {
                self.counts[q] -= 1;
            }
        }
    }
}

impl Environment for CoverageGame {
    fn game(&self) -> &GameDefinition {
        &self.game
    }

    fn utilities_at(&self, t: u64, a: &JointAction) -> Vec<f64> {
        self.inner.utilities(a, t)
    }

    fn potential_at(&self, t: u64, a: &JointAction) -> Option<f64> {
        Some(self.inner.potential(a, t))
    }
}
