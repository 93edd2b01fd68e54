//! Small reference games used by the examples, the CLI and the tests.

use crate::bayesian::{
    EclBayesianBargainingGame, EclBayesianGame, JointStrategyDistribution, TypePrior, UtilityView,
    MAX_FULL_JOINT_PLAYERS,
};
use crate::error::Result;
use crate::games::{NormalFormGame, NormalFormSeparableGame, SeparableBargainingGame};
use crate::geometry::{CostFn, FeasibleSet, PayoffVector};

/// Two producers: Alice turns 10 units of effort into the first good linearly
/// or the second quadratically, Bob does the same with 5 units.
pub fn alice_and_bob() -> Result<SeparableBargainingGame> {
    let costs = [CostFn::Linear { k: 1.0 }, CostFn::Quadratic { k: 0.5 }];
    let sets = vec![FeasibleSet::budget(10.0, costs)?, FeasibleSet::budget(5.0, costs)?];
    SeparableBargainingGame::new(sets, PayoffVector::new(vec![10.0, 10f64.sqrt()])?)
}

/// Two players whose actions each move both payoffs; no outcome improves on
/// everyone's best unilateral payoff.
pub fn variance_counterexample() -> Result<NormalFormSeparableGame> {
    NormalFormSeparableGame::new(vec![
        vec![vec![0.0, -3.0], vec![-1.0, 0.0]],
        vec![vec![0.0, 3.0], vec![-3.0, 2.0]],
    ])
}

/// Row player with two actions against a column player with three.
pub fn threat_game() -> Result<NormalFormGame> {
    NormalFormGame::new(
        vec![2, 3],
        vec![
            vec![4.0, 4.0],
            vec![2.0, 5.0],
            vec![-4.0, 2.0],
            vec![5.0, 2.0],
            vec![3.0, 3.0],
            vec![-3.0, 2.0],
        ],
    )
}

/// Bayesian prisoner's dilemma between two symmetric types.
///
/// Action 0 cooperates with one's own type, action 1 defects. Types are
/// uniform and independent; small games carry the full joint prior.
pub fn bayesian_dilemma(players: usize) -> Result<EclBayesianGame> {
    let prior = if players <= MAX_FULL_JOINT_PLAYERS {
        TypePrior::full_joint(players, 2, vec![0.5f64.powi(players as i32); 1 << players])?
    } else {
        TypePrior::independent(players, vec![0.5, 0.5])?
    };
    EclBayesianGame::new(vec![vec![vec![2.0, 3.0], vec![2.0, 0.0]], vec![vec![2.0, 0.0], vec![2.0, 3.0]]], prior)
}

/// Anonymous joint play of the dilemma where a type-1 and a type-2 player
/// play `(0,0), (0,1), (1,0), (1,1)` with probabilities `a, b, c, d`.
///
/// With `players` set, the full joint table for that many players is built;
/// otherwise only the pairwise tables.
pub fn dilemma_strategy(players: Option<usize>, a: f64, b: f64, c: f64, d: f64) -> Result<JointStrategyDistribution> {
    let tables = vec![vec![a + b, 0.0, 0.0, c + d], vec![a, b, c, d], vec![a, c, b, d], vec![a + c, 0.0, 0.0, b + d]];
    match players {
        Some(2) => JointStrategyDistribution::full_joint(2, 2, 2, tables),
        Some(n) => Err(crate::error::Error::Unsupported(format!("full joint tables for {n} players"))),
        None => JointStrategyDistribution::pairwise(2, 2, tables),
    }
}

/// Two types with quarter-disk action sets, many players, per-other utilities.
pub fn disk_game(marginals: Vec<f64>) -> Result<EclBayesianBargainingGame> {
    let disk = FeasibleSet::disk([1.0, 1.0])?;
    let prior = TypePrior::independent(1000, marginals)?;
    EclBayesianBargainingGame::new(vec![disk.clone(), disk], prior, UtilityView::PerOther, None)
}

/// Three players where the first two can help each other a lot.
pub fn blocking_game() -> Result<NormalFormSeparableGame> {
    NormalFormSeparableGame::new(vec![
        vec![vec![3.0, 0.0, 0.0], vec![2.5, 2.5, 0.0], vec![2.0, 2.0, 2.0]],
        vec![vec![0.0, 3.0, 0.0], vec![2.5, 2.5, 0.0], vec![2.0, 2.0, 2.0]],
        vec![vec![0.0, 0.0, 3.0], vec![0.5, 0.5, 0.0], vec![0.5, 0.5, 0.0]],
    ])
}

/// Three players whose equilibrium-effective core is empty.
pub fn empty_core_game() -> Result<NormalFormSeparableGame> {
    NormalFormSeparableGame::new(vec![
        vec![vec![5.0, 0.0, 5.0], vec![4.0, 4.0, 0.0], vec![3.0, 3.0, 6.0]],
        vec![vec![0.0, 5.0, 5.0], vec![4.0, 4.0, 0.0], vec![3.0, 3.0, 6.0]],
        vec![vec![0.0, 0.0, 5.0], vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 0.0]],
    ])
}
