//! Resistances between diagonal states: recurrence of the unperturbed chain,
//! minimum-resistance paths over `B`, and straight single-agent routes.

use petgraph::algo::{dijkstra, tarjan_scc};
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::visit::EdgeRef;

use super::space::{require_self_loops, ChainState, TransitionModel, DEFAULT_STATE_GUARD};
use crate::error::{Error, Result};
use crate::game::{AgentId, GameDefinition, JointAction};

/// Tolerance of the route reversal identity.
pub const REVERSAL_TOLERANCE: f64 = 1e-9;

/// Recurrent communicating classes of a chain given by its positive-probability edges.
pub fn recurrent_classes(model: &TransitionModel) -> Vec<Vec<usize>> {
    let n = model.space().len();
    let mut graph = DiGraph::<(), ()>::with_capacity(n, 0);
    for _ in 0..n {
        graph.add_node(());
    }
    for (from, row) in model.rows().iter().enumerate() {
        for t in row.iter().filter(|t| t.probability > 0.0) {
            graph.add_edge(NodeIndex::new(from), NodeIndex::new(t.to), ());
        }
    }
    let sccs = tarjan_scc(&graph);
    let mut component = vec![0usize; n];
    for (c, scc) in sccs.iter().enumerate() {
        for node in scc {
            component[node.index()] = c;
        }
    }
    let mut closed: Vec<Vec<usize>> = sccs
        .iter()
        .enumerate()
        .filter(|(c, scc)| {
            scc.iter().all(|node| {
                graph
                    .edges(*node)
                    .all(|e| component[e.target().index()] == *c)
            })
        })
        .map(|(_, scc)| {
            let mut members: Vec<usize> = scc.iter().map(|n| n.index()).collect();
            members.sort_unstable();
            members
        })
        .collect();
    closed.sort();
    closed
}

/// Recurrent classes of the `ε = 0` chain, checked to be exactly the
/// singletons `{(a, a)}`.
pub fn recurrent_classes_unperturbed(game: &GameDefinition) -> Result<Vec<Vec<ChainState>>> {
    let model = TransitionModel::build(game, 0.0, 0.5)?;
    let classes = recurrent_classes(&model);
    let states = model.space().states();
    let diagonal = model.space().diagonal_indices();
    let singletons: Vec<Vec<usize>> = diagonal.iter().map(|&k| vec![k]).collect();
    if classes != singletons {
        let bad = classes
            .iter()
            .find(|c| c.len() != 1 || !states[c[0]].is_diagonal())
            .map(|c| {
                format!(
                    "class {:?}",
                    c.iter().map(|&k| &states[k]).collect::<Vec<_>>()
                )
            })
            .unwrap_or_else(|| {
                format!(
                    "{} closed classes for {} diagonal states",
                    classes.len(),
                    diagonal.len()
                )
            });
        return Err(Error::RecurrenceMismatch(bad));
    }
    Ok(classes
        .into_iter()
        .map(|c| c.into_iter().map(|k| states[k].clone()).collect())
        .collect())
}

/// `(a, a') ∈ E_single`: exactly one agent changes, and feasibly.
pub fn single_deviator(a: &JointAction, b: &JointAction, game: &GameDefinition) -> Option<AgentId> {
    if a.len() != b.len() || a.len() != game.num_agents() {
        return None;
    }
    let mut movers = a.iter().filter(|&(agent, x)| x != b.get(agent));
    let (agent, from) = movers.next()?;
    if movers.next().is_some() {
        return None;
    }
    game.constraints()
        .contains(agent, from, b.get(agent))
        .then_some(agent)
}

/// Dense all-pairs minimum resistances between diagonal states.
#[derive(Clone, Debug)]
pub struct ResistanceGraph {
    nodes: Vec<JointAction>,
    weights: Vec<Vec<f64>>,
    single: Vec<Vec<bool>>,
}

impl ResistanceGraph {
    pub fn nodes(&self) -> &[JointAction] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn weight(&self, from: usize, to: usize) -> f64 {
        self.weights[from][to]
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn is_single(&self, from: usize, to: usize) -> bool {
        self.single[from][to]
    }

    pub fn node_index(&self, a: &JointAction) -> Option<usize> {
        self.nodes.iter().position(|x| x == a)
    }

    /// Weights with every pair outside `E_single` set to `+∞`.
    pub fn single_weights(&self) -> Vec<Vec<f64>> {
        self.weights
            .iter()
            .zip(&self.single)
            .map(|(w, s)| {
                w.iter()
                    .zip(s)
                    .map(|(&w, &s)| if s { w } else { f64::INFINITY })
                    .collect()
            })
            .collect()
    }
}

/// Shortest paths over the transition-resistance graph on `B`, from every
/// diagonal state to every other one.
pub fn min_resistance_paths(game: &GameDefinition) -> Result<ResistanceGraph> {
    min_resistance_paths_with_guard(game, DEFAULT_STATE_GUARD)
}

pub fn min_resistance_paths_with_guard(
    game: &GameDefinition,
    guard: u128,
) -> Result<ResistanceGraph> {
    require_self_loops(game)?;
    let model = TransitionModel::build_with_guard(game, 0.0, 0.5, guard)?;
    let n = model.space().len();
    let mut graph = DiGraph::<(), f64>::with_capacity(n, 0);
    for _ in 0..n {
        graph.add_node(());
    }
    for (from, row) in model.rows().iter().enumerate() {
        for t in row {
            graph.add_edge(NodeIndex::new(from), NodeIndex::new(t.to), t.resistance);
        }
    }
    let diagonal = model.space().diagonal_indices();
    let nodes: Vec<JointAction> = diagonal
        .iter()
        .map(|&k| model.space().states()[k].curr.clone())
        .collect();
    let weights = diagonal
        .iter()
        .map(|&src| {
            let dist = dijkstra(&graph, NodeIndex::new(src), None, |e| *e.weight());
            diagonal
                .iter()
                .map(|&dst| {
                    dist.get(&NodeIndex::new(dst))
                        .copied()
                        .unwrap_or(f64::INFINITY)
                })
                .collect()
        })
        .collect();
    let single = nodes
        .iter()
        .map(|a| {
            nodes
                .iter()
                .map(|b| single_deviator(a, b, game).is_some())
                .collect()
        })
        .collect();
    Ok(ResistanceGraph {
        nodes,
        weights,
        single,
    })
}

/// Resistance of the two-step route `(a0,a0) -> (a0,a1) -> (a1,a1)`:
/// one exploration plus the deviator's utility drop, if any.
pub fn straight_route_resistance(
    a0: &JointAction,
    a1: &JointAction,
    game: &GameDefinition,
) -> Result<f64> {
    let agent = single_deviator(a0, a1, game).ok_or(Error::RouteInfeasible(0))?;
    let drop = game.utility(agent, a0) - game.utility(agent, a1);
    Ok(if drop > 0.0 { 1.0 + drop } else { 1.0 })
}

/// Resistances of a straight route and of its reversal.
#[derive(Clone, Debug, PartialEq)]
pub struct RouteReversal {
    pub forward: f64,
    pub reverse: f64,
    /// `φ(first) - φ(last)`.
    pub potential_gap: f64,
}

impl RouteReversal {
    pub fn residual(&self) -> f64 {
        (self.forward - self.reverse - self.potential_gap).abs()
    }
}

/// Checks `λ(r) - λ(r') = φ(a^0) - φ(a^m)` for a route of single-agent deviations.
pub fn route_reversal_check(route: &[JointAction], game: &GameDefinition) -> Result<RouteReversal> {
    if route.len() < 2 {
        return Err(Error::Domain("a route needs at least two profiles".into()));
    }
    let mut forward = 0.0;
    let mut reverse = 0.0;
    for (k, pair) in route.windows(2).enumerate() {
        let (a, b) = (&pair[0], &pair[1]);
        forward += straight_route_resistance(a, b, game).map_err(|_| Error::RouteInfeasible(k))?;
        reverse += straight_route_resistance(b, a, game).map_err(|_| Error::RouteInfeasible(k))?;
    }
    let first = game.potential(&route[0]).ok_or(Error::MissingPotential)?;
    let last = game
        .potential(&route[route.len() - 1])
        .ok_or(Error::MissingPotential)?;
    let check = RouteReversal {
        forward,
        reverse,
        potential_gap: first - last,
    };
    if check.residual() > REVERSAL_TOLERANCE {
        return Err(Error::Domain(format!(
            "reversal identity violated by {} (forward {}, reverse {}, gap {})",
            check.residual(),
            check.forward,
            check.reverse,
            check.potential_gap
        )));
    }
    Ok(check)
}
