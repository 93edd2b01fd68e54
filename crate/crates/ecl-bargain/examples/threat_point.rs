//! Disagreement point chosen by a game of threats.

use ecl_bargain::catalog::threat_game;
use ecl_bargain::solutions::SolutionWeights;
use ecl_bargain::stability::threat_point;

fn main() -> anyhow::Result<()> {
    let g = threat_game()?;
    let t = threat_point(&g, &SolutionWeights::uniform(2), 12, 50)?;
    println!("{:?} after {} rounds", t.outcome, t.rounds);
    println!("threat profile {:?}", t.profile);
    println!("threat point {:?}, solution {:?}", t.disagreement.as_slice(), t.solution.point.as_slice());
    Ok(())
}
