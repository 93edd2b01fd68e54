//! Prior-weighted bargaining between two types and the effect of splitting one.

use ecl_bargain::catalog::disk_game;
use ecl_bargain::solutions::{nbs, SolutionWeights};

fn main() -> anyhow::Result<()> {
    let g = disk_game(vec![0.75, 0.25])?;
    let w = SolutionWeights::new(g.prior().marginals())?;
    let r = nbs(&g.feasible_set(), g.disagreement(), &w)?;
    println!("disagreement {:?}, solution {:?}", g.disagreement().as_slice(), r.point.as_slice());
    println!("dependency equilibrium: {}", g.dependency_certificate_point(r.point.as_slice(), g.disagreement())?);

    let s = g.split_type(0, 0.5)?;
    let w = SolutionWeights::new(s.prior().marginals())?;
    let r = nbs(&s.feasible_set(), s.disagreement(), &w)?;
    println!("after splitting type 1: {:?}", r.point.as_slice());
    Ok(())
}
