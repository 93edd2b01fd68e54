//! Golden checks of the reference examples.

use std::time::Instant;

use serde::Serialize;

use crate::catalog;
use crate::error::{Error, Result};
use crate::games::{nash_equilibrium, FiniteGame};
use crate::solutions::{decompose, nbs, variance_normalized_compromise, SolutionWeights, VarianceConvention};
use crate::stability::{
    certify_empty_core, core_membership, threat_point, Coalition, CoalitionFunction, ThreatOutcome, BLOCKING_TOL,
};
use crate::sweep::{sweep, sweep_point, SweepModel, SweepSpec};

/// What a check measured: the largest numeric deviation from its targets,
/// whether its qualitative conditions hold, and a short summary.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurement {
    pub residual: f64,
    pub conditions: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub id: &'static str,
    pub criterion: u8,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub seconds: f64,
    pub detail: String,
}

impl CheckOutcome {
    pub fn line(&self) -> String {
        format!(
            "{} [{}] {}: residual {:.3e} (tol {:.1e}, {:.3} s) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.criterion,
            self.id,
            self.residual,
            self.tolerance,
            self.seconds,
            self.detail
        )
    }
}

pub struct Check {
    pub id: &'static str,
    pub criterion: u8,
    pub tolerance: f64,
    /// Wall-clock budget in seconds, if any.
    pub budget: Option<f64>,
    run: fn(f64) -> Result<Measurement>,
}

pub fn checks() -> Vec<Check> {
    vec![
        Check { id: "alice-bob", criterion: 1, tolerance: 0.01, budget: Some(1.0), run: alice_bob },
        Check { id: "variance-normalization", criterion: 2, tolerance: 1e-12, budget: None, run: variance },
        Check { id: "bayesian-dilemma", criterion: 3, tolerance: 1e-12, budget: None, run: dilemma },
        Check { id: "weighted-nbs", criterion: 4, tolerance: 0.01, budget: None, run: weighted },
        Check { id: "double-decrease", criterion: 5, tolerance: 1e-5, budget: None, run: double_decrease },
        Check { id: "paretotopia", criterion: 6, tolerance: 1e-5, budget: None, run: paretotopia },
        Check { id: "threat-game", criterion: 7, tolerance: 0.01, budget: None, run: threat },
        Check { id: "cores", criterion: 8, tolerance: 0.01, budget: Some(5.0), run: cores },
    ]
}

/// Whether `filter` (comma-separated ids or criterion numbers) selects the check.
fn selected(c: &Check, filter: Option<&str>) -> bool {
    match filter {
        None => true,
        Some(f) => f.split(',').map(str::trim).any(|s| s == c.id || s == c.criterion.to_string()),
    }
}

pub fn run_check(c: &Check, tol: Option<f64>) -> CheckOutcome {
    let tolerance = tol.unwrap_or(c.tolerance);
    let start = Instant::now();
    let m = (c.run)(tolerance);
    let seconds = start.elapsed().as_secs_f64();
    let in_budget = c.budget.is_none_or(|b| seconds < b);
    match m {
        Ok(m) => CheckOutcome {
            id: c.id,
            criterion: c.criterion,
            passed: m.conditions && m.residual <= tolerance && in_budget,
            residual: m.residual,
            tolerance,
            seconds,
            detail: if in_budget { m.detail } else { format!("{} over the {} s budget", m.detail, c.budget.unwrap()) },
        },
        Err(e) => CheckOutcome {
            id: c.id,
            criterion: c.criterion,
            passed: false,
            residual: f64::INFINITY,
            tolerance,
            seconds,
            detail: format!("error: {e}"),
        },
    }
}

/// Run the selected checks; an unknown filter is a validation error.
pub fn run(filter: Option<&str>, tol: Option<f64>) -> Result<Vec<CheckOutcome>> {
    let all = checks();
    let picked: Vec<&Check> = all.iter().filter(|c| selected(c, filter)).collect();
    if picked.is_empty() {
        return Err(Error::Invalid(format!("no check matches '{}'", filter.unwrap_or(""))));
    }
    Ok(picked.into_iter().map(|c| run_check(c, tol)).collect())
}

fn dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn alice_bob(_: f64) -> Result<Measurement> {
    let g = catalog::alice_and_bob()?;
    let r = nbs(&g.joint_feasible_set(), g.disagreement(), &SolutionWeights::uniform(2))?;
    let parts = decompose(&g, r.point.as_slice())?;
    let (a, b) = (parts[0][0], parts[1][0]);
    Ok(Measurement {
        residual: dev(&[a, b], &[8.15, 3.15]),
        conditions: r.individually_rational,
        detail: format!("A = {a:.4}, B = {b:.4}"),
    })
}

fn variance(_: f64) -> Result<Measurement> {
    let g = catalog::variance_counterexample()?;
    let v = variance_normalized_compromise(&g, None, VarianceConvention::Unaveraged)?;
    let expected = [[0.2, -0.1], [-0.1, -0.2], [0.1, 0.2], [-0.2, 0.1]];
    let mut residual = dev(&v.means, &[-2.0, 1.0]).max(dev(&v.scales, &[10.0, 10.0]));
    for (o, e) in v.table.iter().zip(&expected) {
        residual = residual.max(dev(&o.values, e));
    }
    let chosen = v.chosen_outcome();
    // Player 1 gets less at the chosen outcome than at the dominant-action outcome.
    let worse = chosen.values[0] < v.table[0].values[0];
    Ok(Measurement {
        residual: residual.max((chosen.values[0] - 0.1).abs()),
        conditions: chosen.profile == [1, 0] && worse,
        detail: format!("chosen (b1,a2) = {:?}, player 1 {} < {}", chosen.values, chosen.values[0], v.table[0].values[0]),
    })
}

fn dilemma(_: f64) -> Result<Measurement> {
    let mut residual: f64 = 0.0;
    let mut certs = Vec::new();
    let mut shown = Vec::new();
    for (players, strategy, target) in [(2, Some(2), [4.0, 4.5]), (11, None, [22.0, 18.0])] {
        let g = catalog::bayesian_dilemma(players)?;
        let s = catalog::dilemma_strategy(strategy, 0.5, 0.0, 0.0, 0.5)?;
        let eu = [g.conditional_expected_utility(&s, 0, 0)?, g.conditional_expected_utility(&s, 1, 0)?];
        residual = residual.max(dev(&eu, &target));
        shown.push(format!("{eu:?}"));
        certs.push(g.dependency_certificate_pure(&[0, 0], &g.bayesian_nash())?.0);
    }
    Ok(Measurement {
        residual,
        conditions: certs == [false, true],
        detail: format!("EU {} and {}, certificates {certs:?}", shown[0], shown[1]),
    })
}

fn weighted(_: f64) -> Result<Measurement> {
    let g = catalog::disk_game(vec![0.75, 0.25])?;
    let d = g.disagreement();
    let r = nbs(&g.feasible_set(), d, &SolutionWeights::new(vec![0.75, 0.25])?)?;
    Ok(Measurement {
        residual: dev(r.point.as_slice(), &[0.92, 0.39]),
        conditions: dev(d.as_slice(), &[0.75, 0.25]) < 1e-12,
        detail: format!("point ({:.4}, {:.4})", r.point[0], r.point[1]),
    })
}

fn double_decrease(tol: f64) -> Result<Measurement> {
    let model = SweepModel::SqrtDoubleDecrease;
    let rows = sweep(&SweepSpec::new(model, 0.5, 1.0, 0.05)?)?;
    let worst = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    let p: f64 = 0.75;
    let row = sweep_point(model, p)?;
    let s = (1.0 - 2.0 * (1.0 - p) * p).sqrt();
    let point = dev(&row.contribution, &[p * p / s, (1.0 - p).powi(2) / s]);
    Ok(Measurement {
        residual: worst,
        conditions: point <= tol / 10.0,
        detail: format!("{} grid points, contribution at p = 3/4 off by {point:.1e}", rows.len()),
    })
}

fn paretotopia(_: f64) -> Result<Measurement> {
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for r in [100.0, 1e9] {
        let rows = sweep(&SweepSpec::new(SweepModel::LogParetotopia { r }, 0.5, 1.0, 0.05)?)?;
        n += rows.len();
        worst = rows.iter().map(|x| x.residual).fold(worst, f64::max);
    }
    Ok(Measurement { residual: worst, conditions: true, detail: format!("{n} grid points over r = 100 and 1e9") })
}

fn threat(_: f64) -> Result<Measurement> {
    let g = catalog::threat_game()?;
    let t = threat_point(&g, &SolutionWeights::uniform(2), 12, 50)?;
    let d = t.disagreement.as_slice();
    let shift = [-d[0], -d[1]];
    let normalized: Vec<f64> = t.solution.point.iter().zip(&shift).map(|(x, s)| x + s).collect();
    let eq = g.pure_nash_equilibria();
    let ne = eq.first().ok_or_else(|| Error::Degenerate("no pure equilibrium".into()))?;
    let ne1 = g.pure_payoffs(ne)[0] + shift[0];
    Ok(Measurement {
        residual: dev(d, &[-3.0, 2.0]).max(dev(&normalized, &[5.5, 2.75])),
        conditions: t.outcome == ThreatOutcome::FixedPoint && normalized[0] < ne1,
        detail: format!("threat {d:?}, solution {normalized:?} in threat units, equilibrium gives player 1 {ne1}"),
    })
}

fn cores(_: f64) -> Result<Measurement> {
    let g = catalog::blocking_game()?;
    let (_, d) = nash_equilibrium(&g);
    let s = nbs(&g.feasible_set(), &d, &SolutionWeights::uniform(3))?;
    let nu = CoalitionFunction::alpha(g)?;
    let blocked = core_membership(&nu, s.point.as_slice(), BLOCKING_TOL)?.blocking;
    let stable = core_membership(&nu, &[5.0, 5.0, 3.0], BLOCKING_TOL)?.in_core;
    let empty = certify_empty_core(&CoalitionFunction::nash(catalog::empty_core_game()?)?)?;
    let pair = Coalition::new(vec![0, 1])?;
    Ok(Measurement {
        residual: dev(s.point.as_slice(), &[13.0 / 3.0, 13.0 / 3.0, 17.0 / 3.0]),
        conditions: blocked.as_ref() == Some(&pair) && stable && empty,
        detail: format!(
            "solution blocked by {}, (5,5,3) in core: {stable}, equilibrium core empty: {empty}",
            blocked.map_or("nobody".to_string(), |c| c.to_string())
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_and_tight_tolerance() {
        let out = run(Some("1,weighted-nbs"), None).unwrap();
        assert_eq!(out.len(), 2);
        assert!(out.iter().all(|o| o.passed), "{out:?}");
        let out = run(Some("alice-bob"), Some(1e-15)).unwrap();
        assert!(!out[0].passed);
        assert!(run(Some("nothing"), None).is_err());
    }
}
