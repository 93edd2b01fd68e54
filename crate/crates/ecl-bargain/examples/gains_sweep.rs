//! Gains from trade as players grow confident that others share their type.

use ecl_bargain::sweep::{sweep, to_csv, SweepModel, SweepSpec};

fn main() -> anyhow::Result<()> {
    for model in [SweepModel::SqrtDoubleDecrease, SweepModel::LogParetotopia { r: 1e9 }] {
        println!("{model:?}");
        print!("{}", to_csv(&sweep(&SweepSpec::new(model, 0.5, 1.0, 0.1)?)?));
    }
    Ok(())
}
