use serde::{Deserialize, Serialize};

use super::prior::TypePrior;
use crate::error::{Error, Result};
use crate::games::SeparableBargainingGame;
use crate::geometry::{FeasibleSet, PayoffVector};

/// Tolerance for treating a point as inside the induced feasible set.
pub const POINT_TOL: f64 = 1e-6;

/// How expected utilities are scaled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UtilityView {
    /// Own contribution plus `(n - 1)` times the expected contribution of one other player.
    #[default]
    Exact,
    /// Expected contribution of a single other player; the large-`n` limit divided by `n - 1`.
    PerOther,
}

/// Interim bargaining game between types with convex action sets.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EclBayesianBargainingGame {
    action_sets: Vec<FeasibleSet>,
    prior: TypePrior,
    view: UtilityView,
    disagreement: PayoffVector,
    explicit_disagreement: bool,
    #[serde(skip)]
    induced: SeparableBargainingGame,
}

impl EclBayesianBargainingGame {
    /// Builds the game; the disagreement point defaults to the Bayesian Nash payoffs.
    pub fn new(
        action_sets: Vec<FeasibleSet>,
        prior: TypePrior,
        view: UtilityView,
        disagreement: Option<PayoffVector>,
    ) -> Result<Self> {
        let m = prior.types();
        if action_sets.len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: action_sets.len() });
        }
        for s in &action_sets {
            if s.dim() != m {
                return Err(Error::DimensionMismatch { expected: m, got: s.dim() });
            }
        }
        let individual: Vec<FeasibleSet> = (0..m)
            .map(|t| action_sets[t].scaled(&image_factors(&prior, view, t)))
            .collect::<Result<_>>()?;
        let explicit_disagreement = disagreement.is_some();
        let d = match disagreement {
            Some(d) => d,
            None => nash_payoffs(&action_sets, &prior, view).1,
        };
        let induced = SeparableBargainingGame::new(individual, d.clone())?;
        Ok(Self { action_sets, prior, view, disagreement: d, explicit_disagreement, induced })
    }

    pub fn types(&self) -> usize {
        self.action_sets.len()
    }

    pub fn players(&self) -> usize {
        self.prior.players()
    }

    pub fn prior(&self) -> &TypePrior {
        &self.prior
    }

    pub fn view(&self) -> UtilityView {
        self.view
    }

    pub fn action_sets(&self) -> &[FeasibleSet] {
        &self.action_sets
    }

    pub fn disagreement(&self) -> &PayoffVector {
        &self.disagreement
    }

    /// Diagonal factors of the map from type `t`'s actions to expected utilities.
    pub fn image_factors(&self, t: usize) -> Vec<f64> {
        image_factors(&self.prior, self.view, t)
    }

    /// Expected-utility contributions type `t` can make to every type.
    pub fn individual_feasible_set(&self, t: usize) -> &FeasibleSet {
        &self.induced.individual_sets()[t]
    }

    pub fn feasible_set(&self) -> FeasibleSet {
        self.induced.joint_feasible_set()
    }

    pub fn induced_bargaining_game(&self) -> &SeparableBargainingGame {
        &self.induced
    }

    /// Each type's own-value maximizing action and the resulting expected utilities.
    pub fn bayesian_nash(&self) -> (Vec<PayoffVector>, PayoffVector) {
        nash_payoffs(&self.action_sets, &self.prior, self.view)
    }

    /// Whether `x` is a Pareto improvement over `d`, which certifies it as a
    /// dependency equilibrium when `d` is the Bayesian Nash payoff.
    pub fn dependency_certificate_point(&self, x: &[f64], d: &[f64]) -> Result<bool> {
        let f = self.feasible_set();
        if !f.contains(x, POINT_TOL)? {
            return Err(Error::OutsideSet);
        }
        if d.len() != x.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), got: d.len() });
        }
        Ok(x.iter().zip(d).all(|(a, b)| *a >= b - 1e-9))
    }

    /// Split type `t` into itself with prior share `nu` and a new last type with share `1 - nu`.
    ///
    /// Action sets are lifted so that both halves hand out the parent's
    /// contribution to each other. An explicit disagreement point is duplicated
    /// onto the new type; a default one is recomputed.
    pub fn split_type(&self, t: usize, nu: f64) -> Result<Self> {
        let m = self.types();
        let prior = self.prior.split(t, nu)?;
        let parent = |s: usize| if s == m { t } else { s };
        let lift: Vec<Vec<f64>> = (0..=m)
            .map(|s| {
                let mut row = vec![0.0; m];
                row[parent(s)] = 1.0;
                row
            })
            .collect();
        let action_sets = (0..=m)
            .map(|s| self.action_sets[parent(s)].linear_image(&lift))
            .collect::<Result<Vec<_>>>()?;
        let d = if self.explicit_disagreement {
            Some(PayoffVector::new((0..=m).map(|s| self.disagreement[parent(s)]).collect())?)
        } else {
            None
        };
        Self::new(action_sets, prior, self.view, d)
    }
}

fn image_factors(prior: &TypePrior, view: UtilityView, t: usize) -> Vec<f64> {
    (0..prior.types())
        .map(|u| {
            let p = prior.conditional(u, t);
            match view {
                UtilityView::Exact => prior.others() * p + if u == t { 1.0 } else { 0.0 },
                UtilityView::PerOther => p,
            }
        })
        .collect()
}

fn nash_payoffs(action_sets: &[FeasibleSet], prior: &TypePrior, view: UtilityView) -> (Vec<PayoffVector>, PayoffVector) {
    let m = action_sets.len();
    let mut actions = Vec::with_capacity(m);
    let mut total = vec![0.0; m];
    for (t, set) in action_sets.iter().enumerate() {
        let mut e = vec![0.0; m];
        e[t] = 1.0;
        let (_, a) = set.support_raw(&e);
        for ((s, f), v) in total.iter_mut().zip(image_factors(prior, view, t)).zip(&a) {
            *s += f * v;
        }
        actions.push(PayoffVector::new(a).expect("finite action"));
    }
    (actions, PayoffVector::new(total).expect("finite payoffs"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk_game(prior: TypePrior, view: UtilityView) -> EclBayesianBargainingGame {
        let disk = FeasibleSet::disk([1.0, 1.0]).unwrap();
        EclBayesianBargainingGame::new(vec![disk.clone(), disk], prior, view, None).unwrap()
    }

    #[test]
    fn three_player_factors() {
        let g = disk_game(TypePrior::independent(3, vec![0.5, 0.5]).unwrap(), UtilityView::Exact);
        assert_eq!(g.image_factors(0), vec![2.0, 1.0]);
        assert_eq!(g.image_factors(1), vec![1.0, 2.0]);
    }

    #[test]
    fn asymmetric_disagreement() {
        let g = disk_game(TypePrior::independent(1000, vec![0.75, 0.25]).unwrap(), UtilityView::PerOther);
        let d = g.disagreement();
        assert!((d[0] - 0.75).abs() < 1e-12 && (d[1] - 0.25).abs() < 1e-12);
        let (v, _) = g.individual_feasible_set(1).support(&[1.0, 0.0]).unwrap();
        assert!((v - 0.25).abs() < 1e-12);
    }

    #[test]
    fn symmetric_disagreement_and_certificate() {
        let g = disk_game(TypePrior::independent(1000, vec![0.5, 0.5]).unwrap(), UtilityView::PerOther);
        assert_eq!(g.disagreement().as_slice(), [0.5, 0.5]);
        let h = 0.5f64.sqrt();
        assert!(g.dependency_certificate_point(&[h, h], &[0.5, 0.5]).unwrap());
        assert!(g.dependency_certificate_point(&[0.5, 0.5], &[0.5, 0.5]).unwrap());
        assert!(!g.dependency_certificate_point(&[0.4, 0.8], &[0.5, 0.5]).unwrap());
        assert!(g.dependency_certificate_point(&[2.0, 2.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn paretotopia_disagreement() {
        let (p, r) = (0.8, 100.0);
        let prior = TypePrior::pairwise(1000, vec![0.5, 0.5], vec![vec![p, 1.0 - p], vec![1.0 - p, p]]).unwrap();
        let a = FeasibleSet::log_resource(r, [1.0, 1.0]).unwrap();
        let g = EclBayesianBargainingGame::new(vec![a.clone(), a], prior, UtilityView::PerOther, None).unwrap();
        let d = g.disagreement();
        assert!((d[0] - p * r.ln()).abs() < 1e-9 && (d[1] - p * r.ln()).abs() < 1e-9);
    }

    #[test]
    fn split_keeps_dimensions() {
        let g = disk_game(TypePrior::independent(1000, vec![0.5, 0.5]).unwrap(), UtilityView::PerOther);
        let s = g.split_type(0, 0.5).unwrap();
        assert_eq!(s.types(), 3);
        assert!((s.prior().marginal(2) - 0.25).abs() < 1e-15);
        let d = s.disagreement();
        assert!((d[0] - d[2]).abs() < 1e-12 && (d[0] - 0.5).abs() < 1e-12, "{d:?}");
        assert!(g.split_type(0, 1.0).is_err());
    }
}
