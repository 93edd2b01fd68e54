//! Gains from trade between two correlated types as the belief in one's own type varies.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bayesian::{EclBayesianBargainingGame, TypePrior, UtilityView};
use crate::error::{Error, Result};
use crate::geometry::FeasibleSet;
use crate::solutions::{decompose, nbs, SolutionWeights};

pub const CSV_HEADER: &str = "p,share_numeric,gains_numeric,share_closed,gains_closed,residual";

/// Returns to resources invested in either value system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum SweepModel {
    /// Square-root utilities; action sets are quarter disks.
    SqrtDoubleDecrease,
    /// Logarithmic utilities of a budget `r`.
    LogParetotopia { r: f64 },
}

impl SweepModel {
    fn action_set(&self) -> Result<FeasibleSet> {
        match *self {
            Self::SqrtDoubleDecrease => FeasibleSet::disk([1.0, 1.0]),
            Self::LogParetotopia { r } => FeasibleSet::log_resource(r, [1.0, 1.0]),
        }
    }

    /// Both types' game when each believes others share its type with probability `p`.
    pub fn game(&self, p: f64) -> Result<EclBayesianBargainingGame> {
        let prior = TypePrior::pairwise(1000, vec![0.5, 0.5], vec![vec![p, 1.0 - p], vec![1.0 - p, p]])?;
        let a = self.action_set()?;
        EclBayesianBargainingGame::new(vec![a.clone(), a], prior, UtilityView::PerOther, None)
    }

    /// Displayed closed forms: the other type's share, the relative gain and
    /// the first type's contribution at the bargaining solution.
    pub fn closed_form(&self, p: f64) -> (f64, f64, [f64; 2]) {
        match *self {
            Self::SqrtDoubleDecrease => {
                let q = 1.0 - 2.0 * (1.0 - p) * p;
                let s = q.sqrt();
                ((1.0 - p).powi(2) / q, s / p - 1.0, [p * p / s, (1.0 - p).powi(2) / s])
            }
            Self::LogParetotopia { r } => {
                let own = p * (p * r).ln();
                let other = (1.0 - p) * ((1.0 - p) * r).max(1.0).ln();
                (other / (own + other), (own + other) / (p * r.ln()) - 1.0, [own, other])
            }
        }
    }
}

/// Grid of own-type beliefs `p` in `[p_min, p_max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    #[serde(flatten)]
    pub model: SweepModel,
    pub p_min: f64,
    pub p_max: f64,
    pub step: f64,
}

impl SweepSpec {
    pub fn new(model: SweepModel, p_min: f64, p_max: f64, step: f64) -> Result<Self> {
        let spec = Self { model, p_min, p_max, step };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.5 <= self.p_min && self.p_min <= self.p_max && self.p_max <= 1.0) {
            return Err(Error::Invalid("beliefs must satisfy 1/2 <= p_min <= p_max <= 1".into()));
        }
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::Invalid("step must be positive".into()));
        }
        if let SweepModel::LogParetotopia { r } = self.model {
            if !(r.is_finite() && r > 1.0) {
                return Err(Error::Invalid("resource budget must exceed 1".into()));
            }
        }
        Ok(())
    }

    /// Grid points, rounded to twelve decimals so that `0.5 + 2 * 0.05` prints as `0.6`.
    pub fn grid(&self) -> Vec<f64> {
        let k = ((self.p_max - self.p_min) / self.step + 1e-9).floor() as usize;
        let round = |v: f64| (v * 1e12).round() / 1e12;
        let mut out: Vec<f64> = (0..=k).map(|i| round(self.p_min + i as f64 * self.step)).collect();
        if self.p_max - out[out.len() - 1] > 1e-9 {
            out.push(self.p_max);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p: f64,
    pub share_numeric: f64,
    pub gains_numeric: f64,
    pub share_closed: f64,
    pub gains_closed: f64,
    /// Largest deviation over share, gains and the first type's contribution.
    pub residual: f64,
    /// First type's contribution at the numeric bargaining solution.
    pub contribution: [f64; 2],
}

/// Numeric solution at one belief; a game without gains from trade yields zero share and gains.
pub fn sweep_point(model: SweepModel, p: f64) -> Result<SweepRow> {
    let (share_closed, gains_closed, closed) = model.closed_form(p);
    let traded = model.game(p).and_then(|g| {
        let r = nbs(&g.feasible_set(), g.disagreement(), &SolutionWeights::uniform(2))?;
        let parts = decompose(g.induced_bargaining_game(), r.point.as_slice())?;
        let c = [parts[0][0], parts[0][1]];
        Ok((c[1] / (c[0] + c[1]), r.point[0] / g.disagreement()[0] - 1.0, c))
    });
    let (share_numeric, gains_numeric, contribution) = match traded {
        Ok(v) => v,
        Err(Error::NoStrictImprovement) => {
            let (_, a) = model.action_set()?.support(&[1.0, 0.0])?;
            (0.0, 0.0, [p * a[0], (1.0 - p) * a[1]])
        }
        Err(e) => return Err(e),
    };
    let residual = [
        (share_numeric - share_closed).abs(),
        (gains_numeric - gains_closed).abs(),
        (contribution[0] - closed[0]).abs(),
        (contribution[1] - closed[1]).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(SweepRow { p, share_numeric, gains_numeric, share_closed, gains_closed, residual, contribution })
}

/// Rows in grid order; grid points are solved in parallel.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    spec.grid().into_par_iter().map(|p| sweep_point(spec.model, p)).collect()
}

/// CSV with a fixed header, LF line endings and shortest round-trip floats
/// (`Debug` formatting switches to exponents for very small or large values).
pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{:?},{:?},{:?},{:?},{:?},{:?}",
            r.p, r.share_numeric, r.gains_numeric, r.share_closed, r.gains_closed, r.residual
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_clean() {
        let s = SweepSpec::new(SweepModel::SqrtDoubleDecrease, 0.5, 1.0, 0.05).unwrap();
        let g = s.grid();
        assert_eq!(g.len(), 11);
        assert_eq!(g[2], 0.6);
        assert_eq!(g[10], 1.0);
        assert!(SweepSpec::new(SweepModel::SqrtDoubleDecrease, 0.4, 1.0, 0.05).is_err());
        assert!(SweepSpec::new(SweepModel::LogParetotopia { r: 1.0 }, 0.5, 1.0, 0.05).is_err());
    }

    #[test]
    fn closed_forms_at_the_ends() {
        let (s, g, _) = SweepModel::SqrtDoubleDecrease.closed_form(0.5);
        assert!((s - 0.5).abs() < 1e-15 && (g - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        let (s, g, _) = SweepModel::SqrtDoubleDecrease.closed_form(1.0);
        assert_eq!((s, g), (0.0, 0.0));
        let (s, g, _) = SweepModel::LogParetotopia { r: 100.0 }.closed_form(1.0);
        assert_eq!((s, g), (0.0, 0.0));
    }

    #[test]
    fn double_decrease_matches() {
        let rows = sweep(&SweepSpec::new(SweepModel::SqrtDoubleDecrease, 0.5, 1.0, 0.05).unwrap()).unwrap();
        for r in &rows {
            assert!(r.residual <= 1e-5, "{r:?}");
        }
        let csv = to_csv(&rows);
        assert!(csv.starts_with(CSV_HEADER) && csv.ends_with('\n') && !csv.contains('\r'));
    }

    #[test]
    fn paretotopia_matches() {
        for r in [100.0, 1e9] {
            let rows = sweep(&SweepSpec::new(SweepModel::LogParetotopia { r }, 0.5, 1.0, 0.05).unwrap()).unwrap();
            for row in &rows {
                assert!(row.residual <= 1e-5, "{row:?}");
            }
        }
    }
}
