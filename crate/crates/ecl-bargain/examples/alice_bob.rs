//! Two producers bargain over who makes which good.

use ecl_bargain::catalog::alice_and_bob;
use ecl_bargain::solutions::{decompose, nbs, weights_from_point, SolutionWeights};

fn main() -> anyhow::Result<()> {
    let g = alice_and_bob()?;
    let f = g.joint_feasible_set();
    let r = nbs(&f, g.disagreement(), &SolutionWeights::uniform(2))?;
    let parts = decompose(&g, r.point.as_slice())?;
    println!("bargaining point {:?}", r.point.as_slice());
    println!("Alice makes {:.3} of good 1, Bob makes {:.3}", parts[0][0], parts[1][0]);
    let w = weights_from_point(&f, r.point.as_slice())?;
    println!("supporting weights {:?} (unique: {})", w.weights.as_slice(), w.unique);
    Ok(())
}
