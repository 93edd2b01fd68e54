use serde::{Deserialize, Serialize};

use super::prior::{digits, index_of, TypePrior};
use crate::error::{Error, Result};

const PROB_TOL: f64 = 1e-12;

/// Finite additively separable anonymous Bayesian game.
/// `payoffs[t][u][a]` is what a player of type `t` playing `a` gives any player of type `u`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GameSpec", into = "GameSpec")]
pub struct EclBayesianGame {
    actions: usize,
    payoffs: Vec<Vec<Vec<f64>>>,
    prior: TypePrior,
}

#[derive(Serialize, Deserialize)]
struct GameSpec {
    payoffs: Vec<Vec<Vec<f64>>>,
    prior: TypePrior,
}

impl TryFrom<GameSpec> for EclBayesianGame {
    type Error = Error;
    fn try_from(s: GameSpec) -> Result<Self> {
        Self::new(s.payoffs, s.prior)
    }
}

impl From<EclBayesianGame> for GameSpec {
    fn from(g: EclBayesianGame) -> Self {
        Self { payoffs: g.payoffs, prior: g.prior }
    }
}

/// Per-type action distributions `sigma[t][a]`.
pub type TypeMixture = Vec<Vec<f64>>;

impl EclBayesianGame {
    pub fn new(payoffs: Vec<Vec<Vec<f64>>>, prior: TypePrior) -> Result<Self> {
        let m = prior.types();
        if payoffs.len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: payoffs.len() });
        }
        let actions = payoffs
            .first()
            .and_then(|r| r.first())
            .map(Vec::len)
            .ok_or(Error::Empty("payoff tensor"))?;
        if actions == 0 {
            return Err(Error::Empty("actions"));
        }
        for row in &payoffs {
            if row.len() != m {
                return Err(Error::DimensionMismatch { expected: m, got: row.len() });
            }
            for u in row {
                if u.len() != actions {
                    return Err(Error::DimensionMismatch { expected: actions, got: u.len() });
                }
                if u.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFinite("payoff tensor"));
                }
            }
        }
        Ok(Self { actions, payoffs, prior })
    }

    pub fn types(&self) -> usize {
        self.payoffs.len()
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    pub fn prior(&self) -> &TypePrior {
        &self.prior
    }

    /// Utility a type-`t` player playing `a` produces for a type-`u` player.
    pub fn payoff(&self, t: usize, u: usize, a: usize) -> f64 {
        self.payoffs[t][u][a]
    }

    fn check_pure(&self, alpha: &[usize]) -> Result<()> {
        if alpha.len() != self.types() {
            return Err(Error::DimensionMismatch { expected: self.types(), got: alpha.len() });
        }
        if alpha.iter().any(|&a| a >= self.actions) {
            return Err(Error::Invalid("action index out of range".into()));
        }
        Ok(())
    }

    fn check_mixture(&self, sigma: &TypeMixture) -> Result<()> {
        if sigma.len() != self.types() {
            return Err(Error::DimensionMismatch { expected: self.types(), got: sigma.len() });
        }
        for row in sigma {
            if row.len() != self.actions {
                return Err(Error::DimensionMismatch { expected: self.actions, got: row.len() });
            }
            if row.iter().any(|p| !(*p >= 0.0)) || (row.iter().sum::<f64>() - 1.0).abs() > PROB_TOL {
                return Err(Error::Invalid("mixture must be a probability vector".into()));
            }
        }
        Ok(())
    }

    /// Ex interim expected utility of an anonymous pure strategy for type `t`.
    pub fn expected_utility_pure(&self, alpha: &[usize], t: usize) -> Result<f64> {
        self.check_pure(alpha)?;
        let others: f64 = (0..self.types())
            .map(|u| self.prior.conditional(t, u) * self.payoff(u, t, alpha[u]))
            .sum();
        Ok(self.payoff(t, t, alpha[t]) + self.prior.others() * others)
    }

    /// Expected utility of action `a` for type `t` when everyone else plays `sigma` independently.
    pub fn action_expected_utility(&self, sigma: &TypeMixture, a: usize, t: usize) -> Result<f64> {
        self.check_mixture(sigma)?;
        let others: f64 = (0..self.types())
            .map(|u| {
                let e: f64 = (0..self.actions).map(|b| sigma[u][b] * self.payoff(u, t, b)).sum();
                self.prior.conditional(t, u) * e
            })
            .sum();
        Ok(self.payoff(t, t, a) + self.prior.others() * others)
    }

    pub fn expected_utility_mixed(&self, sigma: &TypeMixture, t: usize) -> Result<f64> {
        let mut total = 0.0;
        for a in 0..self.actions {
            total += sigma[t][a] * self.action_expected_utility(sigma, a, t)?;
        }
        Ok(total)
    }

    /// Own-value maximizer for each type, lowest index on ties.
    pub fn bayesian_nash(&self) -> Vec<usize> {
        (0..self.types())
            .map(|t| {
                let mut best = 0;
                for a in 1..self.actions {
                    if self.payoff(t, t, a) > self.payoff(t, t, best) {
                        best = a;
                    }
                }
                best
            })
            .collect()
    }

    /// Whether every action with positive probability maximizes the type's own contribution.
    pub fn is_bayesian_nash(&self, sigma: &TypeMixture) -> Result<bool> {
        self.check_mixture(sigma)?;
        Ok((0..self.types()).all(|t| {
            let best = (0..self.actions).map(|a| self.payoff(t, t, a)).fold(f64::NEG_INFINITY, f64::max);
            (0..self.actions).all(|a| sigma[t][a] == 0.0 || self.payoff(t, t, a) >= best - 1e-12)
        }))
    }

    /// Per-type gain of `alpha` over the equilibrium `beta`; `alpha` is certified
    /// when every gain is nonnegative.
    pub fn dependency_certificate_pure(&self, alpha: &[usize], beta: &[usize]) -> Result<(bool, Vec<f64>)> {
        self.check_pure(alpha)?;
        self.check_pure(beta)?;
        let pure = |b: &[usize]| -> TypeMixture {
            b.iter()
                .map(|&a| {
                    let mut r = vec![0.0; self.actions];
                    r[a] = 1.0;
                    r
                })
                .collect()
        };
        if !self.is_bayesian_nash(&pure(beta))? {
            return Err(Error::Invalid("reference profile is not a Bayesian Nash equilibrium".into()));
        }
        let slack: Vec<f64> = (0..self.types())
            .map(|t| {
                let own = self.payoff(t, t, alpha[t]) - self.payoff(t, t, beta[t]);
                let others: f64 = (0..self.types())
                    .map(|u| self.prior.conditional(t, u) * (self.payoff(u, t, alpha[u]) - self.payoff(u, t, beta[u])))
                    .sum();
                own + self.prior.others() * others
            })
            .collect();
        Ok((slack.iter().all(|s| *s >= 0.0), slack))
    }

    /// Conditional expected utility of action `a` for type `t` under `s`.
    pub fn conditional_expected_utility(&self, s: &JointStrategyDistribution, a: usize, t: usize) -> Result<f64> {
        if s.actions() != self.actions || s.types() != self.types() {
            return Err(Error::Invalid("strategy distribution does not match the game".into()));
        }
        if s.action_probability(&self.prior, a, t)? <= 0.0 {
            return Err(Error::ZeroProbability(format!("type {t} never plays action {a}")));
        }
        let mut others = 0.0;
        for u in 0..self.types() {
            let pu = self.prior.conditional(t, u);
            if pu == 0.0 {
                continue;
            }
            let pair = s.pair_table(&self.prior, t, u)?;
            let row = &pair[a * self.actions..(a + 1) * self.actions];
            let mass: f64 = row.iter().sum();
            if mass <= 0.0 {
                return Err(Error::ZeroProbability(format!(
                    "type {t} never plays action {a} alongside type {u}"
                )));
            }
            let e: f64 = row.iter().enumerate().map(|(b, q)| q / mass * self.payoff(u, t, b)).sum();
            others += pu * e;
        }
        Ok(self.payoff(t, t, a) + self.prior.others() * others)
    }
}

/// Possibly correlated belief over action vectors given type vectors.
///
/// `FullJoint` keeps one table over `A^n` per ordered type vector (player 1
/// varying slowest in both). `Pairwise` keeps, for each ordered type pair
/// `(t, u)`, the joint distribution of the actions of a type-`t` player and any
/// other type-`u` player, indexed `a * |A| + b`; it is all that conditional
/// expected utilities consume and it scales to any number of players.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum JointStrategyDistribution {
    FullJoint { players: usize, types: usize, actions: usize, tables: Vec<Vec<f64>> },
    Pairwise { types: usize, actions: usize, tables: Vec<Vec<f64>> },
}

fn check_table(t: &[f64], len: usize) -> Result<()> {
    if t.len() != len {
        return Err(Error::DimensionMismatch { expected: len, got: t.len() });
    }
    if t.iter().any(|v| !(v.is_finite() && *v >= 0.0)) || (t.iter().sum::<f64>() - 1.0).abs() > PROB_TOL {
        return Err(Error::Invalid("action table must be a probability distribution".into()));
    }
    Ok(())
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    use itertools::Itertools;
    (0..n).permutations(n).collect()
}

impl JointStrategyDistribution {
    pub fn full_joint(players: usize, types: usize, actions: usize, tables: Vec<Vec<f64>>) -> Result<Self> {
        let nt = types.pow(players as u32);
        if tables.len() != nt {
            return Err(Error::DimensionMismatch { expected: nt, got: tables.len() });
        }
        for t in &tables {
            check_table(t, actions.pow(players as u32))?;
        }
        Ok(Self::FullJoint { players, types, actions, tables })
    }

    pub fn pairwise(types: usize, actions: usize, tables: Vec<Vec<f64>>) -> Result<Self> {
        if tables.len() != types * types {
            return Err(Error::DimensionMismatch { expected: types * types, got: tables.len() });
        }
        for t in &tables {
            check_table(t, actions * actions)?;
        }
        Ok(Self::Pairwise { types, actions, tables })
    }

    /// Independent play of the per-type mixtures `sigma`.
    pub fn uncorrelated(players: Option<usize>, sigma: &TypeMixture) -> Result<Self> {
        let m = sigma.len();
        let k = sigma.first().map(Vec::len).ok_or(Error::Empty("mixtures"))?;
        match players {
            Some(n) => {
                let tables = (0..m.pow(n as u32))
                    .map(|ti| {
                        let tv = digits(ti, m, n);
                        (0..k.pow(n as u32))
                            .map(|ai| digits(ai, k, n).iter().zip(&tv).map(|(&a, &t)| sigma[t][a]).product())
                            .collect()
                    })
                    .collect();
                Self::full_joint(n, m, k, tables)
            }
            None => {
                let tables = (0..m * m)
                    .map(|idx| {
                        let (t, u) = (idx / m, idx % m);
                        (0..k * k).map(|ab| sigma[t][ab / k] * sigma[u][ab % k]).collect()
                    })
                    .collect();
                Self::pairwise(m, k, tables)
            }
        }
    }

    pub fn types(&self) -> usize {
        match self {
            Self::FullJoint { types, .. } | Self::Pairwise { types, .. } => *types,
        }
    }

    pub fn actions(&self) -> usize {
        match self {
            Self::FullJoint { actions, .. } | Self::Pairwise { actions, .. } => *actions,
        }
    }

    /// Exhaustive check of `s(a | t) = s(pi a | pi t)`.
    pub fn is_anonymous(&self) -> bool {
        match self {
            Self::FullJoint { players, types, actions, tables } => {
                let (n, m, k) = (*players, *types, *actions);
                let perms = permutations(n);
                (0..tables.len()).all(|ti| {
                    let tv = digits(ti, m, n);
                    (0..tables[ti].len()).all(|ai| {
                        let av = digits(ai, k, n);
                        perms.iter().all(|pi| {
                            let pt: Vec<usize> = pi.iter().map(|&i| tv[i]).collect();
                            let pa: Vec<usize> = pi.iter().map(|&i| av[i]).collect();
                            (tables[index_of(&pt, m)][index_of(&pa, k)] - tables[ti][ai]).abs() <= PROB_TOL
                        })
                    })
                })
            }
            Self::Pairwise { types, actions, tables } => {
                let (m, k) = (*types, *actions);
                (0..m).all(|t| {
                    (0..m).all(|u| {
                        (0..k * k).all(|ab| {
                            let (a, b) = (ab / k, ab % k);
                            (tables[t * m + u][ab] - tables[u * m + t][b * k + a]).abs() <= PROB_TOL
                        })
                    })
                })
            }
        }
    }

    /// Joint action distribution of a type-`t` player and another type-`u` player, indexed `a * |A| + b`.
    pub fn pair_table(&self, prior: &TypePrior, t: usize, u: usize) -> Result<Vec<f64>> {
        match self {
            Self::Pairwise { types, tables, .. } => Ok(tables[t * types + u].clone()),
            Self::FullJoint { players, types, actions, tables } => {
                let (n, m, k) = (*players, *types, *actions);
                if n < 2 {
                    return Err(Error::Unsupported("pair tables need at least two players".into()));
                }
                if prior.players() != n || prior.types() != m {
                    return Err(Error::Invalid("prior does not match the strategy distribution".into()));
                }
                let mut out = vec![0.0; k * k];
                let mut mass = 0.0;
                for (ti, table) in tables.iter().enumerate() {
                    let tv = digits(ti, m, n);
                    if tv[0] != t || tv[1] != u {
                        continue;
                    }
                    let p = prior
                        .joint(&tv)
                        .ok_or_else(|| Error::Unsupported("full-joint strategies need a full-joint prior".into()))?;
                    mass += p;
                    for (ai, q) in table.iter().enumerate() {
                        let av = digits(ai, k, n);
                        out[av[0] * k + av[1]] += p * q;
                    }
                }
                if mass <= 0.0 {
                    return Err(Error::ZeroProbability(format!("type pair ({t}, {u}) has zero prior mass")));
                }
                Ok(out.into_iter().map(|v| v / mass).collect())
            }
        }
    }

    /// Probability `s(a | t)` that a type-`t` player plays `a`.
    pub fn action_probability(&self, prior: &TypePrior, a: usize, t: usize) -> Result<f64> {
        let k = self.actions();
        match self {
            Self::Pairwise { types, .. } => {
                let mut total = 0.0;
                for u in 0..*types {
                    let pair = self.pair_table(prior, t, u)?;
                    total += prior.conditional(t, u) * pair[a * k..(a + 1) * k].iter().sum::<f64>();
                }
                Ok(total)
            }
            Self::FullJoint { players, types, tables, .. } => {
                let (n, m) = (*players, *types);
                let mut total = 0.0;
                for (ti, table) in tables.iter().enumerate() {
                    let tv = digits(ti, m, n);
                    if tv[0] != t {
                        continue;
                    }
                    let p = prior
                        .joint(&tv)
                        .ok_or_else(|| Error::Unsupported("full-joint strategies need a full-joint prior".into()))?;
                    let q: f64 =
                        (0..table.len()).filter(|&ai| digits(ai, k, n)[0] == a).map(|ai| table[ai]).sum();
                    total += p * q;
                }
                Ok(total / prior.marginal(t))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Bayesian prisoner's dilemma with `n - 1` other players.
    pub(crate) fn dilemma(prior: TypePrior) -> EclBayesianGame {
        EclBayesianGame::new(
            vec![vec![vec![2.0, 3.0], vec![2.0, 0.0]], vec![vec![2.0, 0.0], vec![2.0, 3.0]]],
            prior,
        )
        .unwrap()
    }

    fn abcd_tables(a: f64, b: f64, c: f64, d: f64) -> Vec<Vec<f64>> {
        vec![vec![a + b, 0.0, 0.0, c + d], vec![a, b, c, d], vec![a, c, b, d], vec![a + c, 0.0, 0.0, b + d]]
    }

    #[test]
    fn pure_expected_utilities() {
        let g = dilemma(TypePrior::full_joint(2, 2, vec![0.25; 4]).unwrap());
        assert_eq!(g.expected_utility_pure(&[1, 1], 0).unwrap(), 4.5);
        assert_eq!(g.expected_utility_pure(&[0, 0], 0).unwrap(), 4.0);
        assert_eq!(g.bayesian_nash(), vec![1, 1]);
    }

    #[test]
    fn conditional_utilities_two_players() {
        let prior = TypePrior::full_joint(2, 2, vec![0.25; 4]).unwrap();
        let g = dilemma(prior);
        let (a, b, c, d) = (0.1, 0.2, 0.3, 0.4);
        let s = JointStrategyDistribution::full_joint(2, 2, 2, abcd_tables(a, b, c, d)).unwrap();
        assert!(s.is_anonymous());
        let eu = g.conditional_expected_utility(&s, 0, 0).unwrap();
        assert!((eu - (3.0 + a / (a + b))).abs() < 1e-12);
        let eu = g.conditional_expected_utility(&s, 1, 0).unwrap();
        assert!((eu - (4.5 + c / (c + d))).abs() < 1e-12);
        let eu = g.conditional_expected_utility(&s, 0, 1).unwrap();
        assert!((eu - (3.0 + a / (a + c))).abs() < 1e-12);
    }

    #[test]
    fn conditional_utilities_many_players() {
        let g = dilemma(TypePrior::independent(11, vec![0.5, 0.5]).unwrap());
        let (a, b, c, d) = (0.1, 0.2, 0.3, 0.4);
        let s = JointStrategyDistribution::pairwise(2, 2, abcd_tables(a, b, c, d)).unwrap();
        let eu = g.conditional_expected_utility(&s, 1, 0).unwrap();
        assert!((eu - (18.0 + 10.0 * c / (c + d))).abs() < 1e-12);
        let eu = g.conditional_expected_utility(&s, 0, 1).unwrap();
        assert!((eu - (12.0 + 10.0 * a / (a + c))).abs() < 1e-12);
    }

    #[test]
    fn zero_probability_action_rejected() {
        let g = dilemma(TypePrior::full_joint(2, 2, vec![0.25; 4]).unwrap());
        let s = JointStrategyDistribution::full_joint(2, 2, 2, abcd_tables(0.0, 0.0, 0.5, 0.5)).unwrap();
        assert!(matches!(g.conditional_expected_utility(&s, 0, 0), Err(Error::ZeroProbability(_))));
    }

    #[test]
    fn certificates() {
        let g = dilemma(TypePrior::independent(2, vec![0.5, 0.5]).unwrap());
        let (ok, slack) = g.dependency_certificate_pure(&[0, 0], &[1, 1]).unwrap();
        assert!(!ok && slack == vec![-0.5, -0.5]);
        let g = dilemma(TypePrior::independent(11, vec![0.5, 0.5]).unwrap());
        let (ok, slack) = g.dependency_certificate_pure(&[0, 0], &[1, 1]).unwrap();
        assert!(ok && slack == vec![4.0, 4.0]);
        assert!(g.dependency_certificate_pure(&[0, 0], &[0, 0]).is_err());
    }
}
