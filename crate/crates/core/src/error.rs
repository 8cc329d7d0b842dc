use thiserror::Error;

use crate::game::{ActionId, AgentId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("agent {0:?} out of range (game has {1} agents)")]
    AgentOutOfRange(AgentId, usize),

    #[error("action {action:?} out of range for agent {agent:?} ({count} actions)")]
    ActionOutOfRange {
        agent: AgentId,
        action: ActionId,
        count: usize,
    },

    #[error("joint action has {got} components, game has {expected} agents")]
    JointActionLength { expected: usize, got: usize },

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("state space guard exceeded: {size} > {guard}")]
    GuardExceeded { size: u128, guard: u128 },

    #[error("game has no potential oracle")]
    MissingPotential,

    #[error("potential maximizer {0:?} is not a constrained Nash equilibrium; game is not a potential game")]
    NotPotentialGame(Vec<usize>),

    #[error("constraint graph of agent {0:?} is disconnected")]
    Disconnected(AgentId),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("agent {agent:?}: exploration set is empty at action {action:?}")]
    EmptyExplorationSet { agent: AgentId, action: ActionId },

    #[error("agent {agent:?}: utility drop {delta} >= 1 at runtime, utilities are not scaled for bounded deviations")]
    UtilityStepTooLarge { agent: AgentId, delta: f64 },

    #[error("chain states do not chain: z2.prev != z1.curr")]
    MismatchedChaining,

    #[error("state is not in the state space B")]
    NotInStateSpace,

    #[error("recurrent classes of the unperturbed chain are not the diagonal singletons: {0}")]
    RecurrenceMismatch(String),

    #[error("single-deviation graph does not span all diagonal states")]
    NotSpanning,

    #[error("route is not a chain of single-agent deviations at step {0}")]
    RouteInfeasible(usize),

    #[error("stationary solve failed: {0}")]
    Solver(String),
}
