//! Threat points and coalitional stability for additively separable games.

use std::fmt;

use itertools::Itertools;
use std::collections::{BTreeMap, HashSet};

use microlp::{ComparisonOp, OptimizationDirection, Variable};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::{nash_equilibrium, FiniteGame, NormalFormSeparableGame};
use crate::geometry::{dot, is_pareto_optimal, FeasibleSet, PayoffVector, PolySumLp, PolytopeSet};
use crate::solutions::{nbs_with, NbsOptions, SolutionReport, SolutionWeights};

/// Largest number of players for which coalitions are enumerated.
pub const MAX_COALITION_PLAYERS: usize = 8;
/// Blocking requires a strict gain of more than this.
pub const BLOCKING_TOL: f64 = 1e-7;
/// Default mixture resolution of the threat game.
pub const DEFAULT_THREAT_GRID: usize = 32;

/// Nonempty set of players, stored sorted and zero-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Coalition(Vec<usize>);

impl Coalition {
    pub fn new(mut members: Vec<usize>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Empty("coalition"));
        }
        members.sort_unstable();
        members.dedup();
        Ok(Self(members))
    }

    pub fn grand(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn check(&self, n: usize) -> Result<()> {
        match self.0.last() {
            Some(&i) if i >= n => Err(Error::Invalid(format!("player {i} out of range"))),
            _ => Ok(()),
        }
    }
}

impl TryFrom<Vec<usize>> for Coalition {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Coalition> for Vec<usize> {
    fn from(c: Coalition) -> Self {
        c.0
    }
}

/// Shown one-based, e.g. `{1,2}`.
impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.iter().map(|i| i + 1).join(","))
    }
}

/// All coalitions by size, then lexicographically.
pub fn coalitions(n: usize) -> Result<Vec<Coalition>> {
    if n > MAX_COALITION_PLAYERS {
        return Err(Error::Unsupported(format!("coalition enumeration is limited to {MAX_COALITION_PLAYERS} players")));
    }
    Ok((1..=n).flat_map(|k| (0..n).combinations(k).map(Coalition)).collect())
}

fn polytopes(g: &NormalFormSeparableGame) -> Vec<PolytopeSet> {
    (0..g.players())
        .map(|i| PolytopeSet::new(g.actions(i).iter().map(|u| u.to_vec()).collect()).expect("validated contributions"))
        .collect()
}

/// `A[i][j]`: what player `i` hands to player `j` when left out of a coalition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct WorstCasePayoffMatrix(Vec<Vec<f64>>);

impl TryFrom<Vec<Vec<f64>>> for WorstCasePayoffMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<WorstCasePayoffMatrix> for Vec<Vec<f64>> {
    fn from(m: WorstCasePayoffMatrix) -> Self {
        m.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WorstCaseMethod {
    /// Every contribution vertex that is Pareto optimal for some coalition.
    Exact,
    /// Maximizers of strictly positive weights on a simplex grid with the given step.
    WeightGrid(f64),
}

impl WorstCasePayoffMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Empty("matrix rows"));
        }
        for r in &rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: r.len() });
            }
            if r.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("matrix"));
            }
        }
        Ok(Self(rows))
    }

    /// Rows are the players' equilibrium contributions.
    pub fn nash(g: &NormalFormSeparableGame) -> Self {
        let (a, _) = nash_equilibrium(g);
        Self(a.iter().enumerate().map(|(i, &k)| g.contribution(i, k).to_vec()).collect())
    }

    /// Worst payoff each player hands out over all coalitions containing them
    /// and all of the coalition's Pareto optimal strategies.
    pub fn worst_case(g: &NormalFormSeparableGame, method: WorstCaseMethod) -> Result<Self> {
        let n = g.players();
        let all = coalitions(n)?;
        let sets = polytopes(g);
        let rows = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut row = vec![f64::INFINITY; n];
                for p in all.iter().filter(|p| p.contains(i)) {
                    for k in pareto_vertices(&sets[i], p, method)? {
                        for (r, v) in row.iter_mut().zip(&sets[i].generators()[k]) {
                            *r = r.min(*v);
                        }
                    }
                }
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows)
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.0[i][j]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

fn project(g: &[f64], p: &Coalition) -> Vec<f64> {
    p.members().iter().map(|&i| g[i]).collect()
}

/// Generators of `set` whose projection onto `p` is Pareto optimal in the projected hull.
fn pareto_vertices(set: &PolytopeSet, p: &Coalition, method: WorstCaseMethod) -> Result<Vec<usize>> {
    let proj: Vec<Vec<f64>> = set.generators().iter().map(|g| project(g, p)).collect();
    match method {
        WorstCaseMethod::Exact => {
            let hull = FeasibleSet::polytope(proj.clone())?;
            let mut out = Vec::new();
            for (k, q) in proj.iter().enumerate() {
                if is_pareto_optimal(&hull, q, 1e-9)? {
                    out.push(k);
                }
            }
            Ok(out)
        }
        WorstCaseMethod::WeightGrid(step) => {
            if !(step > 0.0 && step < 1.0) {
                return Err(Error::Invalid("weight grid step must lie in (0, 1)".into()));
            }
            let proj_set = PolytopeSet::new(proj)?;
            let mut out = Vec::new();
            for w in simplex_grid(p.len(), (1.0 / step).round() as usize, true) {
                for k in proj_set.argmax_face(&w, 1e-12) {
                    if !out.contains(&k) {
                        out.push(k);
                    }
                }
            }
            Ok(out)
        }
    }
}

/// Points of the simplex with coordinates in multiples of `1/m`, first
/// coordinate largest first; `interior` keeps only strictly positive points.
fn simplex_grid(k: usize, m: usize, interior: bool) -> Vec<Vec<f64>> {
    fn rec(k: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for c in (0..=left).rev() {
            cur.push(c);
            rec(k - 1, left - c, cur, out);
            cur.pop();
        }
    }
    let mut raw = Vec::new();
    rec(k, m, &mut Vec::new(), &mut raw);
    let pts: Vec<Vec<f64>> = raw
        .into_iter()
        .filter(|c| !interior || c.iter().all(|&v| v > 0))
        .map(|c| c.into_iter().map(|v| v as f64 / m as f64).collect())
        .collect();
    if pts.is_empty() && interior {
        return vec![vec![1.0 / k as f64; k]];
    }
    pts
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CoalitionKind {
    /// Outsiders respond with whatever hurts each member most.
    Alpha,
    /// Outsiders contribute fixed rows of a payoff matrix.
    Effective { matrix: WorstCasePayoffMatrix },
}

/// What each coalition can guarantee its members.
#[derive(Clone, Debug, PartialEq)]
pub struct CoalitionFunction {
    game: NormalFormSeparableGame,
    sets: Vec<PolytopeSet>,
    kind: CoalitionKind,
}

impl CoalitionFunction {
    pub fn new(game: NormalFormSeparableGame, kind: CoalitionKind) -> Result<Self> {
        let n = game.players();
        if n > MAX_COALITION_PLAYERS {
            return Err(Error::Unsupported(format!("coalition functions are limited to {MAX_COALITION_PLAYERS} players")));
        }
        if let CoalitionKind::Effective { matrix } = &kind {
            if matrix.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: matrix.dim() });
            }
        }
        let sets = polytopes(&game);
        Ok(Self { game, sets, kind })
    }

    pub fn alpha(game: NormalFormSeparableGame) -> Result<Self> {
        Self::new(game, CoalitionKind::Alpha)
    }

    /// Outsiders play their Nash equilibrium actions.
    pub fn nash(game: NormalFormSeparableGame) -> Result<Self> {
        let matrix = WorstCasePayoffMatrix::nash(&game);
        Self::new(game, CoalitionKind::Effective { matrix })
    }

    /// Outsiders hand out their worst Pareto optimal payoffs.
    pub fn worst_case(game: NormalFormSeparableGame, method: WorstCaseMethod) -> Result<Self> {
        let matrix = WorstCasePayoffMatrix::worst_case(&game, method)?;
        Self::new(game, CoalitionKind::Effective { matrix })
    }

    pub fn game(&self) -> &NormalFormSeparableGame {
        &self.game
    }

    pub fn kind(&self) -> &CoalitionKind {
        &self.kind
    }

    pub fn players(&self) -> usize {
        self.sets.len()
    }

    /// What outsiders of `p` contribute to member `i`.
    fn outside(&self, p: &Coalition, i: usize) -> f64 {
        (0..self.players())
            .filter(|j| !p.contains(*j))
            .map(|j| match &self.kind {
                CoalitionKind::Alpha => self.sets[j].generators().iter().map(|g| g[i]).fold(f64::INFINITY, f64::min),
                CoalitionKind::Effective { matrix } => matrix.entry(j, i),
            })
            .sum()
    }

    fn parts(&self, p: &Coalition) -> Vec<&PolytopeSet> {
        p.members().iter().map(|&j| &self.sets[j]).collect()
    }

    /// Largest `min_{i in p} (y_i - x_i)` over payoffs `y` the coalition can guarantee.
    pub fn slack(&self, p: &Coalition, x: &[f64]) -> Result<f64> {
        p.check(self.players())?;
        if x.len() != self.players() {
            return Err(Error::DimensionMismatch { expected: self.players(), got: x.len() });
        }
        let parts = self.parts(p);
        let mut lp = PolySumLp::new(&parts, OptimizationDirection::Maximize, None);
        let t = lp.problem.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
        for &i in p.members() {
            let mut e = lp.coord(i);
            e.push((t, -1.0));
            lp.problem.add_constraint(e.as_slice(), ComparisonOp::Ge, x[i] - self.outside(p, i));
        }
        let sol = lp.solve()?.ok_or_else(|| Error::Lp("slack program infeasible".into()))?;
        Ok(sol.var_value(t))
    }

    /// Best joint payoff `sum_{i in p} lambda_i y_i` the coalition can guarantee.
    fn weighted_value(&self, p: &Coalition, lambda: &[f64]) -> f64 {
        let w: Vec<f64> = (0..self.players()).map(|i| if p.contains(i) { lambda[i] } else { 0.0 }).collect();
        let own: f64 = p.members().iter().map(|&j| self.sets[j].argmax(&w).0).sum();
        own + p.members().iter().map(|&i| lambda[i] * self.outside(p, i)).sum::<f64>()
    }

    /// Comprehensive hull of the coalition's guaranteed payoffs, as half-spaces
    /// `<w, x_p> <= b` in member coordinates; planar coalitions only.
    fn outer_facets(&self, p: &Coalition) -> Result<Vec<(Vec<f64>, f64)>> {
        let c: Vec<f64> = p.members().iter().map(|&i| self.outside(p, i)).collect();
        match p.len() {
            1 => {
                let i = p.members()[0];
                let best = self.sets[i].generators().iter().map(|g| g[i]).fold(f64::NEG_INFINITY, f64::max);
                Ok(vec![(vec![1.0], best + c[0])])
            }
            2 => {
                let pts: Vec<Vec<f64>> = self
                    .parts(p)
                    .iter()
                    .map(|s| s.generators().iter().map(|g| project(g, p)).collect::<Vec<_>>())
                    .multi_cartesian_product()
                    .map(|combo| {
                        let mut s = c.clone();
                        for q in combo {
                            s[0] += q[0];
                            s[1] += q[1];
                        }
                        s
                    })
                    .collect();
                let hull = PolytopeSet::new(pts)?.planar_hull()?;
                let max0 = hull.iter().map(|q| q[0]).fold(f64::NEG_INFINITY, f64::max);
                let max1 = hull.iter().map(|q| q[1]).fold(f64::NEG_INFINITY, f64::max);
                let mut out = vec![(vec![1.0, 0.0], max0), (vec![0.0, 1.0], max1)];
                for k in 0..hull.len() {
                    let (a, b) = (&hull[k], &hull[(k + 1) % hull.len()]);
                    // Counter-clockwise order: the outward normal of edge a -> b is (dy, -dx).
                    let nrm = [b[1] - a[1], a[0] - b[0]];
                    if nrm[0] > 0.0 && nrm[1] > 0.0 {
                        let s = nrm[0] + nrm[1];
                        let w = vec![nrm[0] / s, nrm[1] / s];
                        let rhs = dot(&w, a);
                        out.push((w, rhs));
                    }
                }
                Ok(out)
            }
            3 => {
                let pts: Vec<Vec<f64>> = self
                    .parts(p)
                    .iter()
                    .map(|s| s.generators().iter().map(|g| project(g, p)).collect::<Vec<_>>())
                    .multi_cartesian_product()
                    .map(|combo| (0..3).map(|k| c[k] + combo.iter().map(|q| q[k]).sum::<f64>()).collect())
                    .collect();
                Ok(comprehensive_facets_3d(pts))
            }
            _ => Err(Error::Unsupported("outer facets beyond three members".into())),
        }
    }
}

/// Facets `<w, y> <= b` with `w >= 0` summing to one of the comprehensive hull
/// of points in three dimensions, by brute force over non-dominated points.
fn comprehensive_facets_3d(points: Vec<Vec<f64>>) -> Vec<(Vec<f64>, f64)> {
    const EPS: f64 = 1e-9;
    let mut top: Vec<Vec<f64>> = Vec::new();
    for q in &points {
        let dominated = points.iter().any(|r| r.iter().zip(q).all(|(a, b)| a >= b) && r.iter().zip(q).any(|(a, b)| a > b));
        if !dominated && !top.iter().any(|t| t.iter().zip(q).all(|(a, b)| (a - b).abs() < EPS)) {
            top.push(q.clone());
        }
    }
    let mut dirs: Vec<[f64; 3]> = vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for (a, b) in top.iter().tuple_combinations() {
        dirs.push([a[0] - b[0], a[1] - b[1], a[2] - b[2]]);
    }
    let mut out: Vec<(Vec<f64>, f64)> = Vec::new();
    for (u, v) in dirs.iter().tuple_combinations() {
        let mut w = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
        let scale = w.iter().map(|x| x.abs()).fold(0.0, f64::max);
        if scale < EPS {
            continue;
        }
        if w.iter().sum::<f64>() < 0.0 {
            w.iter_mut().for_each(|x| *x = -*x);
        }
        if w.iter().any(|x| *x < -EPS * scale) {
            continue;
        }
        let total: f64 = w.iter().sum();
        let w: Vec<f64> = w.iter().map(|x| (x / total).max(0.0)).collect();
        let b = top.iter().map(|q| dot(&w, q)).fold(f64::NEG_INFINITY, f64::max);
        let on: Vec<&Vec<f64>> = top.iter().filter(|q| dot(&w, q) >= b - EPS).collect();
        let mut span: Vec<Vec<f64>> = on.iter().map(|q| q.iter().zip(on[0].iter()).map(|(a, b)| a - b).collect()).collect();
        for j in (0..3).filter(|&j| w[j] < EPS) {
            let mut e = vec![0.0; 3];
            e[j] = 1.0;
            span.push(e);
        }
        let m = nalgebra::DMatrix::from_fn(span.len(), 3, |r, c| span[r][c]);
        if m.rank(1e-9) == 2 && !out.iter().any(|(x, _)| x.iter().zip(&w).all(|(a, b)| (a - b).abs() < 1e-9)) {
            out.push((w, b));
        }
    }
    out
}

/// Whether coalition `p` can guarantee every member `i` at least `x_i`.
pub fn effective_set_membership(nu: &CoalitionFunction, p: &Coalition, x: &[f64]) -> Result<bool> {
    Ok(nu.slack(p, x)? >= -1e-9)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoreVerdict {
    pub in_core: bool,
    pub blocking: Option<Coalition>,
    /// Strict gain available to the blocking coalition.
    pub blocking_slack: f64,
}

/// Check `x` against every coalition; the first blocking coalition by size,
/// then lexicographic order, is reported.
pub fn core_membership(nu: &CoalitionFunction, x: &[f64], tol: f64) -> Result<CoreVerdict> {
    let n = nu.players();
    if nu.slack(&Coalition::grand(n), x)? < -tol {
        return Err(Error::OutsideSet);
    }
    let all = coalitions(n)?;
    let slacks = all.par_iter().map(|p| nu.slack(p, x)).collect::<Result<Vec<f64>>>()?;
    for (p, s) in all.into_iter().zip(slacks) {
        if s > tol {
            return Ok(CoreVerdict { in_core: false, blocking: Some(p), blocking_slack: s });
        }
    }
    Ok(CoreVerdict { in_core: true, blocking: None, blocking_slack: 0.0 })
}

/// Sorted terms with repeated variables summed.
fn combine(terms: Vec<(Variable, f64)>) -> Vec<(Variable, f64)> {
    let mut acc = BTreeMap::new();
    for (v, c) in terms {
        *acc.entry(v).or_insert(0.0) += c;
    }
    acc.into_iter().collect()
}

/// Feasible points satisfying `sum_{i in P} lambda_i x_i >= v_lambda(P)` for
/// every proper coalition, pushed to the Pareto frontier.
fn weighted_core_candidate(nu: &CoalitionFunction, lambda: &[f64]) -> Result<Option<Vec<f64>>> {
    let n = nu.players();
    let grand = Coalition::grand(n);
    let parts = nu.parts(&grand);
    let ones = vec![1.0; n];
    let mut lp = PolySumLp::new(&parts, OptimizationDirection::Maximize, Some(&ones));
    for p in coalitions(n)?.into_iter().filter(|p| p.len() < n) {
        // Coalitions without weight fall back to equal weights among members.
        let unweighted = p.members().iter().all(|&i| lambda[i] == 0.0);
        let w: Vec<f64> = (0..n).map(|i| if unweighted && p.contains(i) { 1.0 } else { lambda[i] }).collect();
        let v = nu.weighted_value(&p, &w);
        let mut e = Vec::new();
        for &i in p.members() {
            e.extend(lp.coord(i).into_iter().map(|(var, c)| (var, c * w[i])));
        }
        lp.problem.add_constraint(combine(e).as_slice(), ComparisonOp::Ge, v + 1e-9);
    }
    Ok(lp.solve()?.map(|sol| lp.point(&sol)))
}

/// A point of the core, or `None` when the search finds none.
///
/// Up to four players the facet search below is exact. Larger games try
/// weighted transfer games on the uniform weights, frontier facet normals,
/// coalition facet normals and a simplex grid, then Pareto frontier samples
/// and vertex sums.
pub fn find_core_point(nu: &CoalitionFunction) -> Result<Option<PayoffVector>> {
    let n = nu.players();
    if n > 6 {
        return Err(Error::Unsupported("core search is limited to six players".into()));
    }
    let f = nu.game().feasible_set();
    let check = |x: Vec<f64>| -> Result<Option<PayoffVector>> {
        if core_membership(nu, &x, BLOCKING_TOL)?.in_core {
            Ok(Some(PayoffVector::new(x)?))
        } else {
            Ok(None)
        }
    };
    if n <= 4 {
        return match facet_disjunction(nu, 0.0)? {
            Some(x) => check(x),
            None => Ok(None),
        };
    }
    let mut lambdas = vec![vec![1.0 / n as f64; n]];
    lambdas.extend(facet_normals(nu)?);
    let m = match n {
        1 | 2 => 40,
        3 => 20,
        4 => 10,
        _ => 5,
    };
    lambdas.extend(simplex_grid(n, m, true));
    lambdas.extend(padded_facet_normals(nu)?);
    lambdas.extend(simplex_grid(n, m, false).into_iter().filter(|l| l.contains(&0.0)));
    for lambda in &lambdas {
        if let Some(x) = weighted_core_candidate(nu, lambda)? {
            if let Some(p) = check(x)? {
                return Ok(Some(p));
            }
        }
    }
    let sets = polytopes(nu.game());
    let vertex_sums = sets
        .iter()
        .map(|s| s.generators().to_vec())
        .multi_cartesian_product()
        .take(4096)
        .map(|combo| (0..n).map(|i| combo.iter().map(|g| g[i]).sum()).collect::<Vec<f64>>());
    let frontier = crate::geometry::pareto_frontier_sample(&f, 200)?.into_iter().map(PayoffVector::into_inner);
    for x in frontier.chain(vertex_sums) {
        if let Some(p) = check(x)? {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

/// Outer facet normals of small coalitions, zero outside the coalition.
fn padded_facet_normals(nu: &CoalitionFunction) -> Result<Vec<Vec<f64>>> {
    let n = nu.players();
    let mut out: Vec<Vec<f64>> = Vec::new();
    for p in coalitions(n)?.into_iter().filter(|p| p.len() == 2 && p.len() < n) {
        for (w, _) in nu.outer_facets(&p)? {
            let mut l = vec![0.0; n];
            for (&i, wi) in p.members().iter().zip(&w) {
                l[i] = *wi;
            }
            if !out.contains(&l) {
                out.push(l);
            }
        }
    }
    Ok(out)
}

/// Normals of the grand coalition's frontier facets around sampled vertices.
fn facet_normals(nu: &CoalitionFunction) -> Result<Vec<Vec<f64>>> {
    let f = nu.game().feasible_set();
    let parts = nu.parts(&Coalition::grand(nu.players()));
    let mut out: Vec<Vec<f64>> = Vec::new();
    for x in crate::geometry::pareto_frontier_sample(&f, 24)? {
        for w in crate::solutions::normal_cone_extremes(&parts, x.as_slice())? {
            if w.iter().all(|v| *v > 1e-9) && !out.iter().any(|u| u.iter().zip(&w).all(|(a, b)| (a - b).abs() < 1e-9)) {
                out.push(w);
            }
        }
    }
    Ok(out)
}

/// Decide emptiness of the core exactly when every coalition has at most three
/// members besides the grand coalition.
///
/// A point escapes a coalition's block iff it lies on the outer side of one of
/// the facets of the coalition's comprehensive hull, so the core is a union of
/// polytopes indexed by one facet per coalition. Each is tested by an LP;
/// grand-coalition blocking is relaxed away, which keeps a `true` sound.
pub fn certify_empty_core(nu: &CoalitionFunction) -> Result<bool> {
    let n = nu.players();
    let proper: Vec<Coalition> = coalitions(n)?.into_iter().filter(|p| p.len() < n).collect();
    if proper.iter().any(|p| p.len() > 3) {
        return Err(Error::Unsupported("emptiness certificates need coalitions of at most three players".into()));
    }
    Ok(facet_disjunction(nu, -BLOCKING_TOL)?.is_none())
}

/// A Pareto optimal feasible point on the outer side of one facet of every
/// proper coalition's guaranteed set, with facet offsets shifted by `margin`.
///
/// Depth-first over facet choices: the coalition blocking the current
/// candidate most is branched on, so the search is complete.
fn facet_disjunction(nu: &CoalitionFunction, margin: f64) -> Result<Option<Vec<f64>>> {
    let n = nu.players();
    let proper: Vec<Coalition> = coalitions(n)?.into_iter().filter(|p| p.len() < n).collect();
    let facets = proper.iter().map(|p| nu.outer_facets(p)).collect::<Result<Vec<_>>>()?;
    let grand = Coalition::grand(n);
    let parts = nu.parts(&grand);
    let ones = vec![1.0; n];
    let solve = |choice: &BTreeMap<usize, usize>| -> Result<Option<Vec<f64>>> {
        let mut lp = PolySumLp::new(&parts, OptimizationDirection::Maximize, Some(&ones));
        for (&c, &k) in choice {
            let (w, b) = &facets[c][k];
            let mut e = Vec::new();
            for (&i, wi) in proper[c].members().iter().zip(w) {
                e.extend(lp.coord(i).into_iter().map(|(var, cf)| (var, cf * wi)));
            }
            lp.problem.add_constraint(combine(e).as_slice(), ComparisonOp::Ge, b + margin);
        }
        Ok(lp.solve()?.map(|sol| lp.point(&sol)))
    };
    let mut seen: HashSet<Vec<(usize, usize)>> = HashSet::new();
    let mut stack = vec![BTreeMap::new()];
    while let Some(choice) = stack.pop() {
        let Some(x) = solve(&choice)? else { continue };
        let mut worst: Option<(usize, f64)> = None;
        for (c, p) in proper.iter().enumerate().filter(|(c, _)| !choice.contains_key(c)) {
            let s = nu.slack(p, &x)?;
            if s > BLOCKING_TOL && worst.is_none_or(|(_, w)| s > w) {
                worst = Some((c, s));
            }
        }
        let Some((c, _)) = worst else { return Ok(Some(x)) };
        for k in 0..facets[c].len() {
            let mut next = choice.clone();
            next.insert(c, k);
            if seen.insert(next.iter().map(|(a, b)| (*a, *b)).collect()) {
                stack.push(next);
            }
        }
    }
    Ok(None)
}

/// Best payoff each player can reach alone against worst-case Pareto optimal outsiders.
pub fn stable_disagreement(g: &NormalFormSeparableGame, a: &WorstCasePayoffMatrix) -> Result<PayoffVector> {
    let n = g.players();
    if a.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a.dim() });
    }
    let d = (0..n)
        .map(|j| {
            let own = g.actions(j).iter().map(|u| u[j]).fold(f64::NEG_INFINITY, f64::max);
            own + (0..n).filter(|&i| i != j).map(|i| a.entry(i, j)).sum::<f64>()
        })
        .collect();
    PayoffVector::new(d)
}

/// `x_hat_i = sum_{S containing i} delta_S x_i^S` for a balanced collection.
///
/// `payoffs[k][m]` is the contribution of the `m`-th member of `collection[k]`;
/// every contribution must dominate the matching row of `a`.
pub fn balanced_combination(
    collection: &[Coalition],
    weights: &[f64],
    payoffs: &[Vec<PayoffVector>],
    a: &WorstCasePayoffMatrix,
) -> Result<Vec<PayoffVector>> {
    let n = a.dim();
    if collection.len() != weights.len() || collection.len() != payoffs.len() {
        return Err(Error::DimensionMismatch { expected: collection.len(), got: weights.len().min(payoffs.len()) });
    }
    if weights.iter().any(|w| !(*w >= 0.0)) {
        return Err(Error::Invalid("balancing weights must be nonnegative".into()));
    }
    for i in 0..n {
        let s: f64 = collection.iter().zip(weights).filter(|(c, _)| c.contains(i)).map(|(_, w)| w).sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::Invalid(format!("weights of coalitions containing player {i} sum to {s}")));
        }
    }
    let mut out = vec![vec![0.0; n]; n];
    for ((c, w), ps) in collection.iter().zip(weights).zip(payoffs) {
        c.check(n)?;
        if ps.len() != c.len() {
            return Err(Error::DimensionMismatch { expected: c.len(), got: ps.len() });
        }
        for (&i, x) in c.members().iter().zip(ps) {
            if x.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: x.dim() });
            }
            if x.iter().zip(&a.rows()[i]).any(|(v, floor)| *v < floor - 1e-9) {
                return Err(Error::Invalid(format!("contribution of player {i} falls below its worst-case row")));
            }
            for (o, v) in out[i].iter_mut().zip(x.iter()) {
                *o += w * v;
            }
        }
    }
    out.into_iter().map(PayoffVector::new).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ThreatOutcome {
    FixedPoint,
    /// Round-start profiles that repeat.
    Cycle { profiles: Vec<Vec<Vec<f64>>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThreatReport {
    pub disagreement: PayoffVector,
    pub profile: Vec<Vec<f64>>,
    pub outcome: ThreatOutcome,
    pub rounds: usize,
    /// Bargaining outcome from the final disagreement point.
    pub solution: SolutionReport,
}

fn threat_nbs(f: &FeasibleSet, d: &[f64], w: &SolutionWeights) -> Result<SolutionReport> {
    let opts = NbsOptions { drop_unimprovable: true, ..NbsOptions::default() };
    match nbs_with(f, d, w, &opts) {
        Err(Error::NoStrictImprovement) => Ok(SolutionReport {
            point: PayoffVector::new(d.to_vec())?,
            objective: f64::NEG_INFINITY,
            gains: PayoffVector::zeros(d.len()),
            iterations: 0,
            converged: true,
            individually_rational: true,
            gap: 0.0,
        }),
        other => other,
    }
}

/// Disagreement profile at which no player can raise their own bargaining
/// payoff by switching to another mixture on a grid of resolution `1/grid`.
///
/// Players best-respond in turn starting from their first actions; a repeated
/// round-start profile is reported as a cycle.
pub fn threat_point<G: FiniteGame + Sync>(g: &G, w: &SolutionWeights, grid: usize, max_rounds: usize) -> Result<ThreatReport> {
    if grid == 0 {
        return Err(Error::Invalid("grid resolution must be at least one".into()));
    }
    let n = g.players();
    if w.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: w.dim() });
    }
    let f = g.feasible_set();
    let counts = g.action_counts();
    let grids: Vec<Vec<Vec<f64>>> = counts.iter().map(|&k| simplex_grid(k, grid, false)).collect();
    let mut profile: Vec<Vec<f64>> = grids.iter().map(|gr| gr[0].clone()).collect();
    let mut history: Vec<Vec<Vec<f64>>> = Vec::new();
    for round in 0..max_rounds {
        if let Some(k) = history.iter().position(|h| *h == profile) {
            let d = g.mixed_payoffs(&profile);
            let solution = threat_nbs(&f, &d, w)?;
            return Ok(ThreatReport {
                disagreement: PayoffVector::new(d)?,
                profile,
                outcome: ThreatOutcome::Cycle { profiles: history[k..].to_vec() },
                rounds: round,
                solution,
            });
        }
        history.push(profile.clone());
        let mut changed = false;
        for i in 0..n {
            let value = |m: &Vec<f64>| -> Result<f64> {
                let mut trial = profile.clone();
                trial[i] = m.clone();
                let d = g.mixed_payoffs(&trial);
                Ok(threat_nbs(&f, &d, w)?.point[i])
            };
            let current = value(&profile[i])?;
            let values = grids[i].par_iter().map(value).collect::<Result<Vec<f64>>>()?;
            let mut best = (current, None);
            for (k, v) in values.into_iter().enumerate() {
                if v > best.0 + 1e-9 {
                    best = (v, Some(k));
                }
            }
            if let (_, Some(k)) = best {
                profile[i] = grids[i][k].clone();
                changed = true;
            }
        }
        if !changed {
            let d = g.mixed_payoffs(&profile);
            let solution = threat_nbs(&f, &d, w)?;
            return Ok(ThreatReport {
                disagreement: PayoffVector::new(d)?,
                profile,
                outcome: ThreatOutcome::FixedPoint,
                rounds: round + 1,
                solution,
            });
        }
    }
    Err(Error::NonConvergence(format!("threat game did not settle within {max_rounds} rounds")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{blocking_game, empty_core_game, threat_game};
    use crate::solutions::nbs;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn coalition_order_and_display() {
        let all = coalitions(3).unwrap();
        let shown: Vec<String> = all.iter().map(|c| c.to_string()).collect();
        assert_eq!(shown, ["{1}", "{2}", "{3}", "{1,2}", "{1,3}", "{2,3}", "{1,2,3}"]);
        assert!(coalitions(9).is_err());
        assert!(Coalition::new(vec![]).is_err());
        assert_eq!(Coalition::new(vec![2, 0, 2]).unwrap().members(), [0, 2]);
    }

    #[test]
    fn threat_point_of_two_player_game() {
        let g = threat_game().unwrap();
        let r = threat_point(&g, &SolutionWeights::uniform(2), 12, 50).unwrap();
        assert_eq!(r.outcome, ThreatOutcome::FixedPoint);
        assert!(close(r.disagreement.as_slice(), &[-3.0, 2.0], 1e-9), "{r:?}");
        assert!(close(r.solution.point.as_slice(), &[2.5, 4.75], 1e-6), "{r:?}");
    }

    #[test]
    fn threat_point_of_blocking_game() {
        let g = blocking_game().unwrap();
        let r = threat_point(&g, &SolutionWeights::uniform(3), 1, 20).unwrap();
        assert_eq!(r.outcome, ThreatOutcome::FixedPoint);
        assert!(close(r.disagreement.as_slice(), &[3.0, 3.0, 3.0], 1e-9), "{r:?}");
    }

    #[test]
    fn blocking_game_core() {
        let g = blocking_game().unwrap();
        let (_, d) = nash_equilibrium(&g);
        let s = nbs(&g.feasible_set(), &d, &SolutionWeights::uniform(3)).unwrap();
        assert!(close(s.point.as_slice(), &[13.0 / 3.0, 13.0 / 3.0, 17.0 / 3.0], 1e-6), "{s:?}");
        let nu = CoalitionFunction::alpha(g).unwrap();
        let v = core_membership(&nu, s.point.as_slice(), BLOCKING_TOL).unwrap();
        assert_eq!(v.blocking, Some(Coalition::new(vec![0, 1]).unwrap()));
        assert!(core_membership(&nu, &[5.0, 5.0, 3.0], BLOCKING_TOL).unwrap().in_core);
        assert_eq!(core_membership(&nu, &[9.0, 9.0, 9.0], BLOCKING_TOL).unwrap_err(), Error::OutsideSet);
        let x = find_core_point(&nu).unwrap().expect("core point");
        assert!(core_membership(&nu, x.as_slice(), BLOCKING_TOL).unwrap().in_core);
        assert!(!certify_empty_core(&nu).unwrap());
    }

    #[test]
    fn empty_core() {
        let g = empty_core_game().unwrap();
        let a = WorstCasePayoffMatrix::nash(&g);
        assert_eq!(a.rows(), [vec![5.0, 0.0, 5.0], vec![0.0, 5.0, 5.0], vec![0.0, 0.0, 5.0]]);
        let nu = CoalitionFunction::nash(g).unwrap();
        assert!(certify_empty_core(&nu).unwrap());
        assert!(find_core_point(&nu).unwrap().is_none());
        // Escapes {1,2} through one coordinate only, yet is blocked elsewhere.
        assert!(!core_membership(&nu, &[8.0, 3.0, 16.0], BLOCKING_TOL).unwrap().in_core);
        assert!(effective_set_membership(&nu, &Coalition::new(vec![0, 1]).unwrap(), &[9.0, 4.0, 0.0]).unwrap());
    }

    #[test]
    fn worst_case_matrix_and_stable_point() {
        let g = blocking_game().unwrap();
        let exact = WorstCasePayoffMatrix::worst_case(&g, WorstCaseMethod::Exact).unwrap();
        let grid = WorstCasePayoffMatrix::worst_case(&g, WorstCaseMethod::WeightGrid(0.05)).unwrap();
        assert_eq!(exact, grid);
        assert_eq!(exact.rows()[0], vec![2.0, 0.0, 0.0]);
        let d = stable_disagreement(&g, &exact).unwrap();
        assert!(d.iter().zip(nash_equilibrium(&g).1.iter()).all(|(a, b)| a <= b));
    }

    #[test]
    fn balanced_combination_of_halves() {
        let a = WorstCasePayoffMatrix::new(vec![vec![0.0; 2]; 2]).unwrap();
        let c = vec![Coalition::new(vec![0]).unwrap(), Coalition::new(vec![1]).unwrap(), Coalition::grand(2)];
        let p = |v: Vec<f64>| PayoffVector::new(v).unwrap();
        let payoffs = vec![vec![p(vec![2.0, 0.0])], vec![p(vec![0.0, 2.0])], vec![p(vec![1.0, 1.0]), p(vec![1.0, 1.0])]];
        let x = balanced_combination(&c, &[0.5, 0.5, 0.5], &payoffs, &a).unwrap();
        assert_eq!(x[0].as_slice(), [1.5, 0.5]);
        assert!(balanced_combination(&c, &[0.5, 0.5, 0.6], &payoffs, &a).is_err());
    }

    #[test]
    fn core_on_a_coalition_facet() {
        // The only core points sit on the frontier of {2,3} with no weight on player 1.
        let g = NormalFormSeparableGame::new(vec![
            vec![vec![3.0, 2.75, 7.75]],
            vec![vec![6.5, 0.75, 2.5], vec![8.25, 1.5, 6.25], vec![4.75, 1.25, 5.75], vec![8.5, 8.0, 4.5]],
            vec![vec![0.75, 4.5, 6.75], vec![5.75, 2.5, 7.0], vec![1.25, 5.75, 4.75]],
        ])
        .unwrap();
        let nu = CoalitionFunction::worst_case(g, WorstCaseMethod::Exact).unwrap();
        let x = find_core_point(&nu).unwrap().expect("core point");
        assert!(core_membership(&nu, x.as_slice(), BLOCKING_TOL).unwrap().in_core);
        assert!(!certify_empty_core(&nu).unwrap());
    }

    #[test]
    fn cube_facets() {
        let pts = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![0.2, 0.2, 0.2]];
        let f = comprehensive_facets_3d(pts);
        assert_eq!(f.len(), 7);
        let third = 1.0 / 3.0;
        assert!(f.iter().any(|(w, b)| w.iter().all(|v| (v - third).abs() < 1e-12) && (b - third).abs() < 1e-12));
        assert!(f.iter().any(|(w, b)| w == &vec![1.0, 0.0, 0.0] && *b == 1.0));
    }

    #[test]
    fn five_players_share() {
        let n = 5;
        let actions = (0..n)
            .map(|i| {
                let mut own = vec![0.0; n];
                own[i] = 3.0;
                vec![own, vec![1.0; n]]
            })
            .collect();
        let nu = CoalitionFunction::worst_case(NormalFormSeparableGame::new(actions).unwrap(), WorstCaseMethod::Exact).unwrap();
        let x = find_core_point(&nu).unwrap().expect("core point");
        assert!(core_membership(&nu, x.as_slice(), BLOCKING_TOL).unwrap().in_core);
    }

    #[test]
    fn single_player() {
        let g = NormalFormSeparableGame::new(vec![vec![vec![1.0], vec![4.0]]]).unwrap();
        let nu = CoalitionFunction::alpha(g).unwrap();
        assert!(core_membership(&nu, &[4.0], BLOCKING_TOL).unwrap().in_core);
        assert!(!core_membership(&nu, &[3.0], BLOCKING_TOL).unwrap().in_core);
        assert_eq!(find_core_point(&nu).unwrap().unwrap().as_slice(), [4.0]);
    }
}
