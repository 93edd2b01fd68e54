//! Summing variance-normalized utilities can leave a player worse off.

use ecl_bargain::catalog::variance_counterexample;
use ecl_bargain::solutions::{variance_normalized_compromise, VarianceConvention};

fn main() -> anyhow::Result<()> {
    let g = variance_counterexample()?;
    let v = variance_normalized_compromise(&g, None, VarianceConvention::Unaveraged)?;
    println!("means {:?}, scales {:?}", v.means, v.scales);
    for o in &v.table {
        println!("profile {:?} -> {:?}", o.profile, o.values);
    }
    let c = v.chosen_outcome();
    println!("chosen {:?}; player 1 gets {} instead of {}", c.profile, c.values[0], v.table[0].values[0]);
    Ok(())
}
