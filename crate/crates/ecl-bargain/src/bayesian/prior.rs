use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const PROB_TOL: f64 = 1e-12;
pub const MAX_FULL_JOINT_PLAYERS: usize = 5;
pub const MAX_FULL_JOINT_TYPES: usize = 4;

/// Anonymous common prior over type vectors.
///
/// `FullJoint` stores `p(t_1, ..., t_n)` with player 1 varying slowest.
/// `Pairwise` stores the marginals `p(t)` and the conditionals
/// `conditionals[t][t2] = p(t2 | t)` that any other player has type `t2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PriorSpec", into = "PriorSpec")]
pub enum TypePrior {
    FullJoint { players: usize, types: usize, table: Vec<f64> },
    Pairwise { players: usize, marginals: Vec<f64>, conditionals: Vec<Vec<f64>> },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
enum PriorSpec {
    FullJoint { players: usize, types: usize, table: Vec<f64> },
    Pairwise { players: usize, marginals: Vec<f64>, conditionals: Vec<Vec<f64>> },
}

impl TryFrom<PriorSpec> for TypePrior {
    type Error = Error;
    fn try_from(s: PriorSpec) -> Result<Self> {
        match s {
            PriorSpec::FullJoint { players, types, table } => Self::full_joint(players, types, table),
            PriorSpec::Pairwise { players, marginals, conditionals } => Self::pairwise(players, marginals, conditionals),
        }
    }
}

impl From<TypePrior> for PriorSpec {
    fn from(p: TypePrior) -> Self {
        match p {
            TypePrior::FullJoint { players, types, table } => Self::FullJoint { players, types, table },
            TypePrior::Pairwise { players, marginals, conditionals } => Self::Pairwise { players, marginals, conditionals },
        }
    }
}

fn check_distribution(p: &[f64], what: &str) -> Result<()> {
    if p.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::Invalid(format!("{what} must be nonnegative")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > PROB_TOL {
        return Err(Error::Invalid(format!("{what} sums to {s}, not 1")));
    }
    Ok(())
}

/// Mixed-radix digits of `idx`, most significant first.
pub(crate) fn digits(mut idx: usize, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for k in (0..len).rev() {
        out[k] = idx % base;
        idx /= base;
    }
    out
}

pub(crate) fn index_of(v: &[usize], base: usize) -> usize {
    v.iter().fold(0, |acc, &d| acc * base + d)
}

impl TypePrior {
    pub fn full_joint(players: usize, types: usize, table: Vec<f64>) -> Result<Self> {
        if players == 0 || types == 0 {
            return Err(Error::Empty("players or types"));
        }
        if players > MAX_FULL_JOINT_PLAYERS || types > MAX_FULL_JOINT_TYPES {
            return Err(Error::Unsupported(format!(
                "full-joint priors are limited to {MAX_FULL_JOINT_PLAYERS} players and {MAX_FULL_JOINT_TYPES} types"
            )));
        }
        let size = types.pow(players as u32);
        if table.len() != size {
            return Err(Error::DimensionMismatch { expected: size, got: table.len() });
        }
        check_distribution(&table, "prior table")?;
        for idx in 0..size {
            let mut v = digits(idx, types, players);
            v.sort_unstable();
            if (table[idx] - table[index_of(&v, types)]).abs() > PROB_TOL {
                return Err(Error::Invalid("prior is not invariant under player permutations".into()));
            }
        }
        let prior = Self::FullJoint { players, types, table };
        prior.check_positive()?;
        Ok(prior)
    }

    pub fn pairwise(players: usize, marginals: Vec<f64>, conditionals: Vec<Vec<f64>>) -> Result<Self> {
        if players == 0 {
            return Err(Error::Empty("players"));
        }
        let m = marginals.len();
        if m == 0 {
            return Err(Error::Empty("types"));
        }
        check_distribution(&marginals, "type marginals")?;
        if conditionals.len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: conditionals.len() });
        }
        for row in &conditionals {
            if row.len() != m {
                return Err(Error::DimensionMismatch { expected: m, got: row.len() });
            }
            check_distribution(row, "conditional row")?;
        }
        for t in 0..m {
            for u in 0..m {
                if (marginals[t] * conditionals[t][u] - marginals[u] * conditionals[u][t]).abs() > PROB_TOL {
                    return Err(Error::Invalid(format!("pair marginal is not exchangeable for types {t}, {u}")));
                }
            }
        }
        let prior = Self::Pairwise { players, marginals, conditionals };
        prior.check_positive()?;
        Ok(prior)
    }

    /// Types drawn independently from `marginals`.
    pub fn independent(players: usize, marginals: Vec<f64>) -> Result<Self> {
        let rows = vec![marginals.clone(); marginals.len()];
        Self::pairwise(players, marginals, rows)
    }

    fn check_positive(&self) -> Result<()> {
        for t in 0..self.types() {
            if self.marginal(t) <= 0.0 {
                return Err(Error::Invalid(format!("type {t} has zero prior probability")));
            }
        }
        Ok(())
    }

    pub fn players(&self) -> usize {
        match self {
            Self::FullJoint { players, .. } | Self::Pairwise { players, .. } => *players,
        }
    }

    pub fn types(&self) -> usize {
        match self {
            Self::FullJoint { types, .. } => *types,
            Self::Pairwise { marginals, .. } => marginals.len(),
        }
    }

    /// Number of other players, `n - 1`.
    pub fn others(&self) -> f64 {
        (self.players() - 1) as f64
    }

    pub fn marginal(&self, t: usize) -> f64 {
        match self {
            Self::FullJoint { players, types, table } => (0..table.len())
                .filter(|&idx| digits(idx, *types, *players)[0] == t)
                .map(|idx| table[idx])
                .sum(),
            Self::Pairwise { marginals, .. } => marginals[t],
        }
    }

    pub fn marginals(&self) -> Vec<f64> {
        (0..self.types()).map(|t| self.marginal(t)).collect()
    }

    /// Probability `p(t2 | t)` that any other player has type `t2` given own type `t`.
    pub fn conditional(&self, t: usize, t2: usize) -> f64 {
        match self {
            Self::FullJoint { players, types, table } => {
                if *players == 1 {
                    return self.marginal(t2);
                }
                let joint: f64 = (0..table.len())
                    .filter(|&idx| {
                        let v = digits(idx, *types, *players);
                        v[0] == t && v[1] == t2
                    })
                    .map(|idx| table[idx])
                    .sum();
                joint / self.marginal(t)
            }
            Self::Pairwise { conditionals, .. } => conditionals[t][t2],
        }
    }

    pub fn conditional_matrix(&self) -> Vec<Vec<f64>> {
        let m = self.types();
        (0..m).map(|t| (0..m).map(|u| self.conditional(t, u)).collect()).collect()
    }

    /// Joint probability of a full type vector (full-joint mode only).
    pub(crate) fn joint(&self, v: &[usize]) -> Option<f64> {
        match self {
            Self::FullJoint { types, table, .. } => Some(table[index_of(v, *types)]),
            Self::Pairwise { .. } => None,
        }
    }

    pub fn to_pairwise(&self) -> Self {
        Self::Pairwise { players: self.players(), marginals: self.marginals(), conditionals: self.conditional_matrix() }
    }

    /// Split type `t` into `t` with mass share `nu` and a new last type with share `1 - nu`.
    pub fn split(&self, t: usize, nu: f64) -> Result<Self> {
        if !(nu > 0.0 && nu < 1.0) {
            return Err(Error::Invalid(format!("split share must lie in (0, 1), got {nu}")));
        }
        let m = self.types();
        if t >= m {
            return Err(Error::Invalid(format!("type {t} out of range")));
        }
        match self {
            Self::FullJoint { players, table, .. } => {
                let n = *players;
                let m2 = m + 1;
                let out: Vec<f64> = (0..m2.pow(n as u32))
                    .map(|idx| {
                        let v = digits(idx, m2, n);
                        let mut factor = 1.0;
                        let orig: Vec<usize> = v
                            .iter()
                            .map(|&s| {
                                if s == t {
                                    factor *= nu;
                                    t
                                } else if s == m {
                                    factor *= 1.0 - nu;
                                    t
                                } else {
                                    s
                                }
                            })
                            .collect();
                        factor * table[index_of(&orig, m)]
                    })
                    .collect();
                Self::full_joint(n, m2, out)
            }
            Self::Pairwise { players, marginals, conditionals } => {
                let parent = |s: usize| if s == m { t } else { s };
                let share = |s: usize| {
                    if s == t {
                        nu
                    } else if s == m {
                        1.0 - nu
                    } else {
                        1.0
                    }
                };
                let new_marg: Vec<f64> = (0..=m).map(|s| share(s) * marginals[parent(s)]).collect();
                let new_cond: Vec<Vec<f64>> = (0..=m)
                    .map(|s| (0..=m).map(|u| share(u) * conditionals[parent(s)][parent(u)]).collect())
                    .collect();
                Ok(Self::Pairwise { players: *players, marginals: new_marg, conditionals: new_cond })
            }
        }
    }

    /// Merge type `b` into type `a`; the remaining types keep their order.
    pub fn merge(&self, a: usize, b: usize) -> Result<Self> {
        let m = self.types();
        if a == b || a >= m || b >= m {
            return Err(Error::Invalid("merge needs two distinct valid types".into()));
        }
        let target = |s: usize| {
            let s = if s == b { a } else { s };
            if s > b {
                s - 1
            } else {
                s
            }
        };
        match self {
            Self::FullJoint { players, table, .. } => {
                let n = *players;
                let mut out = vec![0.0; (m - 1).pow(n as u32)];
                for (idx, p) in table.iter().enumerate() {
                    let v: Vec<usize> = digits(idx, m, n).into_iter().map(target).collect();
                    out[index_of(&v, m - 1)] += p;
                }
                Self::full_joint(n, m - 1, out)
            }
            Self::Pairwise { players, marginals, conditionals } => {
                let mut marg = vec![0.0; m - 1];
                let mut pair = vec![vec![0.0; m - 1]; m - 1];
                for s in 0..m {
                    marg[target(s)] += marginals[s];
                    for u in 0..m {
                        pair[target(s)][target(u)] += marginals[s] * conditionals[s][u];
                    }
                }
                let cond = (0..m - 1).map(|s| pair[s].iter().map(|v| v / marg[s]).collect()).collect();
                Ok(Self::Pairwise { players: *players, marginals: marg, conditionals: cond })
            }
        }
    }
}

/// Symmetric distribution over the pair of subtyped types of two distinct players.
/// Entry `(2t + c, 2u + e)` is the probability that one player is `(t, c)` and
/// the other `(u, e)`, where subtype 0 is `C` and 1 is `D`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubtypePairPrior {
    types: usize,
    table: Vec<Vec<f64>>,
}

impl SubtypePairPrior {
    pub fn new(table: Vec<Vec<f64>>) -> Result<Self> {
        let k = table.len();
        if k == 0 || k % 2 != 0 {
            return Err(Error::Invalid("subtype table needs two rows per type".into()));
        }
        for row in &table {
            if row.len() != k {
                return Err(Error::DimensionMismatch { expected: k, got: row.len() });
            }
        }
        let flat: Vec<f64> = table.iter().flatten().copied().collect();
        check_distribution(&flat, "subtype pair table")?;
        for (i, j) in (0..k).tuple_combinations() {
            if (table[i][j] - table[j][i]).abs() > PROB_TOL {
                return Err(Error::Invalid("subtype pair table must be symmetric".into()));
            }
        }
        Ok(Self { types: k / 2, table })
    }

    pub fn types(&self) -> usize {
        self.types
    }

    /// `p(u, C | t, C)`.
    pub fn cooperative_conditional(&self, t: usize, u: usize) -> f64 {
        let row = &self.table[2 * t];
        row[2 * u] / row.iter().sum::<f64>()
    }
}

/// Reduced anonymous prior `p'` and scales `delta'_t` with
/// `p(t', C | t, C) = p'(t' | t) * delta'_t`.
pub fn subtype_reduction(prior: &SubtypePairPrior, players: usize) -> Result<(TypePrior, Vec<f64>)> {
    let m = prior.types;
    let cc: Vec<Vec<f64>> = (0..m).map(|t| (0..m).map(|u| prior.table[2 * t][2 * u]).collect()).collect();
    let delta: f64 = cc.iter().flatten().sum();
    if delta <= 0.0 {
        return Err(Error::ZeroProbability("no mass on cooperative pairs".into()));
    }
    let marg: Vec<f64> = cc.iter().map(|row| row.iter().sum::<f64>() / delta).collect();
    if marg.iter().any(|&p| p <= 0.0) {
        return Err(Error::ZeroProbability("a type never meets a cooperative partner".into()));
    }
    let cond: Vec<Vec<f64>> = (0..m).map(|t| (0..m).map(|u| cc[t][u] / delta / marg[t]).collect()).collect();
    let scales = (0..m)
        .map(|t| {
            let own: f64 = prior.table[2 * t].iter().sum();
            marg[t] * delta / own
        })
        .collect();
    // Rounding can leave rows a hair away from 1; renormalize before validation.
    let cond = cond
        .into_iter()
        .map(|row: Vec<f64>| {
            let s: f64 = row.iter().sum();
            row.into_iter().map(|v| v / s).collect()
        })
        .collect();
    let ms: f64 = marg.iter().sum();
    let marg = marg.into_iter().map(|v| v / ms).collect();
    Ok((TypePrior::pairwise(players, marg, cond)?, scales))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_conditionals() {
        let p = TypePrior::independent(3, vec![0.5, 0.5]).unwrap();
        assert_eq!(p.conditional(0, 1), 0.5);
        let q = TypePrior::full_joint(2, 2, vec![0.25; 4]).unwrap();
        assert!((q.conditional(0, 1) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn correlated_full_joint() {
        let p = TypePrior::full_joint(2, 2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert_eq!(p.conditional(0, 0), 1.0);
        assert_eq!(p.marginal(1), 0.5);
    }

    #[test]
    fn asymmetric_independent() {
        let p = TypePrior::independent(100, vec![0.75, 0.25]).unwrap();
        assert_eq!(p.conditional(0, 0), 0.75);
        assert_eq!(p.conditional(1, 0), 0.75);
    }

    #[test]
    fn rejects_non_anonymous_and_inconsistent() {
        assert!(TypePrior::full_joint(2, 2, vec![0.4, 0.1, 0.2, 0.3]).is_err());
        assert!(TypePrior::pairwise(2, vec![0.5, 0.5], vec![vec![0.9, 0.1], vec![0.2, 0.8]]).is_err());
        assert!(TypePrior::independent(2, vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn split_shares_and_merge() {
        let p = TypePrior::pairwise(4, vec![0.5, 0.5], vec![vec![0.75, 0.25], vec![0.25, 0.75]]).unwrap();
        let s = p.split(0, 0.3).unwrap();
        assert!((s.marginal(0) - 0.15).abs() < 1e-15 && (s.marginal(2) - 0.35).abs() < 1e-15);
        let back = s.merge(0, 2).unwrap();
        for t in 0..2 {
            for u in 0..2 {
                assert!((back.conditional(t, u) - p.conditional(t, u)).abs() < 1e-12);
            }
        }
        let f = TypePrior::full_joint(2, 2, vec![0.375, 0.125, 0.125, 0.375]).unwrap();
        let fs = f.split(1, 0.5).unwrap();
        let fb = fs.merge(1, 2).unwrap();
        for t in 0..2 {
            for u in 0..2 {
                assert!((fb.conditional(t, u) - f.conditional(t, u)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn reduction_all_cooperative() {
        // Everyone is subtype C: p' is the type prior, scales are 1.
        let t = vec![
            vec![0.25, 0.0, 0.25, 0.0],
            vec![0.0, 0.0, 0.0, 0.0],
            vec![0.25, 0.0, 0.25, 0.0],
            vec![0.0, 0.0, 0.0, 0.0],
        ];
        let (p, d) = subtype_reduction(&SubtypePairPrior::new(t).unwrap(), 10).unwrap();
        assert!((p.conditional(0, 1) - 0.5).abs() < 1e-12);
        assert!(d.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }
}
