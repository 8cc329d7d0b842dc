//! Payoff-based learning for constrained potential games.
//!
//! [`game`] holds the game model and its assumption checks, [`learning`] the
//! partially irrational learner and the DISL baseline, [`chain`] the exact
//! Markov-chain analysis used to certify stochastic stability on small games,
//! and [`coverage`] the sensor coverage game on a grid.

pub mod chain;
pub mod coverage;
pub mod error;
pub mod game;
pub mod learning;
pub mod toys;

pub use error::{Error, Result};
pub use game::{ActionId, AgentId, ConstraintMap, GameDefinition, JointAction};
