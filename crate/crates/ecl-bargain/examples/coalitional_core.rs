//! Blocking coalitions, core points and an empty core.

use ecl_bargain::catalog::{blocking_game, empty_core_game};
use ecl_bargain::games::{nash_equilibrium, FiniteGame};
use ecl_bargain::solutions::{nbs, SolutionWeights};
use ecl_bargain::stability::{
    certify_empty_core, core_membership, find_core_point, stable_disagreement, CoalitionFunction, WorstCaseMethod,
    WorstCasePayoffMatrix, BLOCKING_TOL,
};

fn main() -> anyhow::Result<()> {
    let g = blocking_game()?;
    let (_, d) = nash_equilibrium(&g);
    let s = nbs(&g.feasible_set(), &d, &SolutionWeights::uniform(3))?;
    let alpha = CoalitionFunction::alpha(g.clone())?;
    let v = core_membership(&alpha, s.point.as_slice(), BLOCKING_TOL)?;
    println!("solution {:?} blocked by {:?}", s.point.as_slice(), v.blocking.map(|c| c.to_string()));
    println!("a core point: {:?}", find_core_point(&alpha)?.map(|x| x.into_inner()));

    let a = WorstCasePayoffMatrix::worst_case(&g, WorstCaseMethod::Exact)?;
    println!("worst-case matrix {:?}", a.rows());
    println!("stable disagreement {:?}", stable_disagreement(&g, &a)?.as_slice());

    let nash_core = CoalitionFunction::nash(empty_core_game()?)?;
    println!("equilibrium core of the second game is empty: {}", certify_empty_core(&nash_core)?);
    Ok(())
}
