//! Complete-information games with finitely many actions and the bargaining
//! problems built from them.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{minkowski_sum, FeasibleSet, PayoffVector, MEMBERSHIP_TOL};

/// Gains below this count as no strict improvement over the disagreement point.
pub const IMPROVEMENT_TOL: f64 = 1e-9;

/// Finite games whose payoffs extend to mixed profiles.
pub trait FiniteGame {
    fn players(&self) -> usize;

    fn action_counts(&self) -> Vec<usize>;

    /// Payoff vector of a profile of independent mixtures.
    fn mixed_payoffs(&self, profile: &[Vec<f64>]) -> Vec<f64>;

    /// Set of payoff vectors reachable by jointly randomized action profiles.
    fn feasible_set(&self) -> FeasibleSet;

    fn pure_payoffs(&self, actions: &[usize]) -> Vec<f64> {
        let profile: Vec<Vec<f64>> = actions
            .iter()
            .zip(self.action_counts())
            .map(|(&a, k)| {
                let mut m = vec![0.0; k];
                m[a] = 1.0;
                m
            })
            .collect();
        self.mixed_payoffs(&profile)
    }
}

/// Every pure profile, last player varying fastest.
pub fn pure_profiles(counts: &[usize]) -> impl Iterator<Item = Vec<usize>> {
    counts.iter().map(|&k| 0..k).multi_cartesian_product()
}

fn check_mixture(m: &[f64], k: usize) -> Result<()> {
    if m.len() != k {
        return Err(Error::DimensionMismatch { expected: k, got: m.len() });
    }
    if m.iter().any(|p| !(p.is_finite() && *p >= -1e-12)) || (m.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::Invalid("mixture must be a probability vector".into()));
    }
    Ok(())
}

/// Additively separable game: action `a` of player `i` hands `u_i(a)[j]` to player `j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<Vec<f64>>>", into = "Vec<Vec<Vec<f64>>>")]
pub struct NormalFormSeparableGame {
    actions: Vec<Vec<PayoffVector>>,
}

impl NormalFormSeparableGame {
    pub fn new(actions: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let n = actions.len();
        if n == 0 {
            return Err(Error::Empty("players"));
        }
        let mut out = Vec::with_capacity(n);
        for acts in actions {
            if acts.is_empty() {
                return Err(Error::Empty("actions"));
            }
            let mut v = Vec::with_capacity(acts.len());
            for u in acts {
                if u.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: u.len() });
                }
                v.push(PayoffVector::new(u)?);
            }
            out.push(v);
        }
        Ok(Self { actions: out })
    }

    pub fn actions(&self, i: usize) -> &[PayoffVector] {
        &self.actions[i]
    }

    pub fn contribution(&self, i: usize, a: usize) -> &[f64] {
        &self.actions[i][a]
    }

    /// Convex hull of player `i`'s contribution vectors.
    pub fn individual_set(&self, i: usize) -> FeasibleSet {
        FeasibleSet::polytope(self.actions[i].iter().map(|u| u.to_vec()).collect())
            .expect("validated contributions")
    }

    pub fn individual_sets(&self) -> Vec<FeasibleSet> {
        (0..self.players()).map(|i| self.individual_set(i)).collect()
    }
}

impl TryFrom<Vec<Vec<Vec<f64>>>> for NormalFormSeparableGame {
    type Error = Error;
    fn try_from(v: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<NormalFormSeparableGame> for Vec<Vec<Vec<f64>>> {
    fn from(g: NormalFormSeparableGame) -> Self {
        g.actions
            .into_iter()
            .map(|a| a.into_iter().map(PayoffVector::into_inner).collect())
            .collect()
    }
}

impl FiniteGame for NormalFormSeparableGame {
    fn players(&self) -> usize {
        self.actions.len()
    }

    fn action_counts(&self) -> Vec<usize> {
        self.actions.iter().map(Vec::len).collect()
    }

    fn mixed_payoffs(&self, profile: &[Vec<f64>]) -> Vec<f64> {
        let n = self.players();
        let mut x = vec![0.0; n];
        for (acts, m) in self.actions.iter().zip(profile) {
            for (u, p) in acts.iter().zip(m) {
                for (xj, uj) in x.iter_mut().zip(u.iter()) {
                    *xj += p * uj;
                }
            }
        }
        x
    }

    fn feasible_set(&self) -> FeasibleSet {
        minkowski_sum(self.individual_sets()).expect("at least one player")
    }
}

/// General finite game given by a payoff vector per pure profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NormalFormSpec", into = "NormalFormSpec")]
pub struct NormalFormGame {
    actions: Vec<usize>,
    payoffs: Vec<PayoffVector>,
}

#[derive(Serialize, Deserialize)]
struct NormalFormSpec {
    actions: Vec<usize>,
    payoffs: Vec<Vec<f64>>,
}

impl NormalFormGame {
    /// `payoffs` lists profiles in [`pure_profiles`] order.
    pub fn new(actions: Vec<usize>, payoffs: Vec<Vec<f64>>) -> Result<Self> {
        let n = actions.len();
        if n == 0 {
            return Err(Error::Empty("players"));
        }
        if actions.contains(&0) {
            return Err(Error::Empty("actions"));
        }
        let total: usize = actions.iter().product();
        if payoffs.len() != total {
            return Err(Error::DimensionMismatch { expected: total, got: payoffs.len() });
        }
        let payoffs = payoffs
            .into_iter()
            .map(|u| {
                if u.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: u.len() });
                }
                PayoffVector::new(u)
            })
            .collect::<Result<_>>()?;
        Ok(Self { actions, payoffs })
    }

    fn index(&self, profile: &[usize]) -> usize {
        profile.iter().zip(&self.actions).fold(0, |acc, (&a, &k)| acc * k + a)
    }

    pub fn payoff(&self, profile: &[usize]) -> &[f64] {
        &self.payoffs[self.index(profile)]
    }

    /// Pure Nash equilibria, in profile order.
    pub fn pure_nash_equilibria(&self) -> Vec<Vec<usize>> {
        pure_profiles(&self.actions)
            .filter(|prof| {
                (0..self.players()).all(|i| {
                    let own = self.payoff(prof)[i];
                    (0..self.actions[i]).all(|b| {
                        let mut dev = prof.clone();
                        dev[i] = b;
                        self.payoff(&dev)[i] <= own
                    })
                })
            })
            .collect()
    }
}

impl TryFrom<NormalFormSpec> for NormalFormGame {
    type Error = Error;
    fn try_from(s: NormalFormSpec) -> Result<Self> {
        Self::new(s.actions, s.payoffs)
    }
}

impl From<NormalFormGame> for NormalFormSpec {
    fn from(g: NormalFormGame) -> Self {
        Self { actions: g.actions, payoffs: g.payoffs.into_iter().map(PayoffVector::into_inner).collect() }
    }
}

impl FiniteGame for NormalFormGame {
    fn players(&self) -> usize {
        self.actions.len()
    }

    fn action_counts(&self) -> Vec<usize> {
        self.actions.clone()
    }

    fn mixed_payoffs(&self, profile: &[Vec<f64>]) -> Vec<f64> {
        let mut x = vec![0.0; self.players()];
        for prof in pure_profiles(&self.actions) {
            let p: f64 = prof.iter().zip(profile).map(|(&a, m)| m[a]).product();
            if p != 0.0 {
                for (xj, uj) in x.iter_mut().zip(self.payoff(&prof)) {
                    *xj += p * uj;
                }
            }
        }
        x
    }

    fn feasible_set(&self) -> FeasibleSet {
        FeasibleSet::polytope(self.payoffs.iter().map(|u| u.to_vec()).collect()).expect("validated payoffs")
    }
}

/// Payoff vector of a mixed profile after validating the mixtures.
pub fn checked_mixed_payoffs(g: &impl FiniteGame, profile: &[Vec<f64>]) -> Result<Vec<f64>> {
    let counts = g.action_counts();
    if profile.len() != counts.len() {
        return Err(Error::DimensionMismatch { expected: counts.len(), got: profile.len() });
    }
    for (m, &k) in profile.iter().zip(&counts) {
        check_mixture(m, k)?;
    }
    Ok(g.mixed_payoffs(profile))
}

/// Bargaining problem over individual feasible sets with a disagreement point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparableBargainingGame {
    individual_sets: Vec<FeasibleSet>,
    disagreement: PayoffVector,
}

impl SeparableBargainingGame {
    /// Validates that `d` is feasible and that some feasible point beats it in every coordinate.
    pub fn new(individual_sets: Vec<FeasibleSet>, disagreement: PayoffVector) -> Result<Self> {
        let n = individual_sets.len();
        if n == 0 {
            return Err(Error::Empty("individual sets"));
        }
        for s in &individual_sets {
            if s.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: s.dim() });
            }
        }
        if disagreement.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: disagreement.dim() });
        }
        let g = Self { individual_sets, disagreement };
        let joint = g.joint_feasible_set();
        if !joint.contains(&g.disagreement, MEMBERSHIP_TOL)? {
            return Err(Error::OutsideSet);
        }
        let coords: Vec<usize> = (0..n).collect();
        match joint.max_min_gain(&g.disagreement, &coords) {
            Ok((t, _)) if t > IMPROVEMENT_TOL => Ok(g),
            Ok(_) | Err(Error::NoStrictImprovement) => Err(Error::NoStrictImprovement),
            Err(e) => Err(e),
        }
    }

    pub fn players(&self) -> usize {
        self.individual_sets.len()
    }

    pub fn individual_sets(&self) -> &[FeasibleSet] {
        &self.individual_sets
    }

    pub fn disagreement(&self) -> &PayoffVector {
        &self.disagreement
    }

    pub fn joint_feasible_set(&self) -> FeasibleSet {
        minkowski_sum(self.individual_sets.clone()).expect("at least one player")
    }
}

/// Bargaining problem whose individual sets are the hulls of each player's contributions.
pub fn from_normal_form(g: &NormalFormSeparableGame, d: PayoffVector) -> Result<SeparableBargainingGame> {
    SeparableBargainingGame::new(g.individual_sets(), d)
}

pub fn joint_feasible_set(g: &SeparableBargainingGame) -> FeasibleSet {
    g.joint_feasible_set()
}

/// Each player picks the action with the largest own contribution, lowest index on ties.
pub fn nash_equilibrium(g: &NormalFormSeparableGame) -> (Vec<usize>, PayoffVector) {
    let actions: Vec<usize> = (0..g.players())
        .map(|i| {
            let mut best = 0;
            for (a, u) in g.actions(i).iter().enumerate() {
                if u[i] > g.actions(i)[best][i] {
                    best = a;
                }
            }
            best
        })
        .collect();
    let x = g.pure_payoffs(&actions);
    (actions, PayoffVector::new(x).expect("finite payoffs"))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn table_two() -> NormalFormSeparableGame {
        NormalFormSeparableGame::new(vec![
            vec![vec![0.0, -3.0], vec![-1.0, 0.0]],
            vec![vec![0.0, 3.0], vec![-3.0, 2.0]],
        ])
        .unwrap()
    }

    fn table_nine() -> NormalFormSeparableGame {
        NormalFormSeparableGame::new(vec![
            vec![vec![3.0, 0.0, 0.0], vec![2.5, 2.5, 0.0], vec![2.0, 2.0, 2.0]],
            vec![vec![0.0, 3.0, 0.0], vec![2.5, 2.5, 0.0], vec![2.0, 2.0, 2.0]],
            vec![vec![0.0, 0.0, 3.0], vec![0.5, 0.5, 0.0], vec![0.5, 0.5, 0.0]],
        ])
        .unwrap()
    }

    #[test]
    fn table_two_equilibrium_and_no_improvement() {
        let g = table_two();
        let (a, x) = nash_equilibrium(&g);
        assert_eq!(a, vec![0, 0]);
        assert_eq!(x.as_slice(), [0.0, 0.0]);
        let err = from_normal_form(&g, PayoffVector::zeros(2)).unwrap_err();
        assert_eq!(err, Error::NoStrictImprovement);
    }

    #[test]
    fn table_nine_is_valid() {
        let g = table_nine();
        let (a, x) = nash_equilibrium(&g);
        assert_eq!(a, vec![0, 0, 0]);
        assert_eq!(x.as_slice(), [3.0, 3.0, 3.0]);
        assert!(from_normal_form(&g, x).is_ok());
    }

    #[test]
    fn single_player_has_no_improvement() {
        let g = NormalFormSeparableGame::new(vec![vec![vec![5.0]]]).unwrap();
        let err = from_normal_form(&g, PayoffVector::new(vec![5.0]).unwrap()).unwrap_err();
        assert_eq!(err, Error::NoStrictImprovement);
    }

    #[test]
    fn empty_actions_rejected() {
        assert_eq!(NormalFormSeparableGame::new(vec![vec![], vec![vec![0.0, 0.0]]]).unwrap_err(), Error::Empty("actions"));
    }

    #[test]
    fn general_game_equilibrium() {
        let g = NormalFormGame::new(
            vec![2, 3],
            vec![
                vec![4.0, 4.0],
                vec![2.0, 5.0],
                vec![-4.0, 2.0],
                vec![5.0, 2.0],
                vec![3.0, 3.0],
                vec![-3.0, 2.0],
            ],
        )
        .unwrap();
        assert_eq!(g.pure_nash_equilibria(), vec![vec![1, 1]]);
        assert_eq!(g.pure_payoffs(&[1, 2]), vec![-3.0, 2.0]);
        let m = g.mixed_payoffs(&[vec![0.5, 0.5], vec![0.0, 1.0, 0.0]]);
        assert_eq!(m, vec![2.5, 4.0]);
    }

    #[test]
    fn serde_round_trip() {
        let g = table_nine();
        let s = serde_json::to_string(&g).unwrap();
        let back: NormalFormSeparableGame = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<NormalFormSeparableGame>("[[[1.0]], []]").is_err());
    }
}
