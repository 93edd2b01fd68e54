//! Conditional expected utilities in a prisoner's dilemma between two types.

use ecl_bargain::catalog::{bayesian_dilemma, dilemma_strategy};

fn main() -> anyhow::Result<()> {
    for (players, full) in [(2, Some(2)), (11, None)] {
        let g = bayesian_dilemma(players)?;
        let s = dilemma_strategy(full, 0.5, 0.0, 0.0, 0.5)?;
        let cooperate = g.conditional_expected_utility(&s, 0, 0)?;
        let defect = g.conditional_expected_utility(&s, 1, 0)?;
        let (certified, slack) = g.dependency_certificate_pure(&[0, 0], &g.bayesian_nash())?;
        println!("{players} players: cooperate {cooperate}, defect {defect}, certified {certified} {slack:?}");
    }
    Ok(())
}
