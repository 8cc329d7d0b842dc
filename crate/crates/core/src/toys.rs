//! Small built-in games used by the certification suite.

use crate::game::{AgentId, ConstraintMap, GameDefinition};

/// Scale applied to the 2x2 coordination game so that single deviations
/// change utilities by less than one (unscaled, the largest change is 2).
pub const COORDINATION_2X2_SCALE: f64 = 0.49;

/// Two agents, actions {x, y}, unconstrained, identical interest with
/// `φ(x,x) = 1`, `φ(y,y) = 2` and zero off the diagonal, all multiplied by
/// `scale`.
pub fn coordination_2x2(scale: f64) -> GameDefinition {
    const PHI: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, 2.0]];
    let cm = ConstraintMap::complete(&[2, 2]).expect("static game");
    GameDefinition::identical_interest(cm, move |a| {
        scale * PHI[a.get(AgentId(0)).0][a.get(AgentId(1)).0]
    })
}

/// Two agents with three actions each, unconstrained, identical interest.
/// Every diagonal profile is a Nash equilibrium; `(2,2)` is the unique
/// potential maximizer.
pub fn coordination_3x3() -> GameDefinition {
    const PHI: [[f64; 3]; 3] = [[0.5, 0.1, 0.0], [0.1, 0.3, 0.2], [0.0, 0.2, 0.9]];
    let cm = ConstraintMap::complete(&[3, 3]).expect("static game");
    GameDefinition::identical_interest(cm, |a| PHI[a.get(AgentId(0)).0][a.get(AgentId(1)).0])
}

/// One agent on the path `x - y - z` with `R(x) = {x,y}`, `R(y) = {x,y,z}`,
/// `R(z) = {y,z}` and utility increasing along the path.
pub fn path_single_agent() -> GameDefinition {
    const U: [f64; 3] = [0.0, 0.3, 0.6];
    let cm =
        ConstraintMap::new(vec![vec![vec![0, 1], vec![0, 1, 2], vec![1, 2]]]).expect("static game");
    GameDefinition::identical_interest(cm, |a| U[a.get(AgentId(0)).0])
}

/// The games the certification suite runs on, with display names.
pub fn certification_games() -> Vec<(&'static str, GameDefinition)> {
    vec![
        ("path-1x3", path_single_agent()),
        ("coordination-2x2", coordination_2x2(COORDINATION_2X2_SCALE)),
        ("coordination-3x3", coordination_3x3()),
    ]
}
