//! Nash, Kalai-Smorodinsky and Armstrong solutions on one feasible set.

use ecl_bargain::geometry::FeasibleSet;
use ecl_bargain::solutions::{armstrong_solution, ideal_point, ksbs, nbs, SolutionWeights};

fn main() -> anyhow::Result<()> {
    // Players 1 and 2 share a utility function; player 3 differs.
    let f = FeasibleSet::polytope(vec![vec![2.0, 2.0, 1.0], vec![3.0, 3.0, 1.0], vec![2.0, 2.0, 2.0]])?;
    let d = [2.0, 2.0, 1.0];
    println!("ideal point {:?}", ideal_point(&f, &d)?);
    println!("nash       {:?}", nbs(&f, &d, &SolutionWeights::uniform(3))?.point.as_slice());
    println!("kalai      {:?}", ksbs(&f, &d)?.point.as_slice());
    println!("armstrong  {:?}", armstrong_solution(&f, &d)?.point.as_slice());
    Ok(())
}
