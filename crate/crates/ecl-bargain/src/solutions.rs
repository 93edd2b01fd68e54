//! Bargaining solutions over convex feasible sets and the correspondence
//! between frontier points and supporting weights.

use std::f64::consts::FRAC_PI_2;

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::{pure_profiles, FiniteGame, NormalFormSeparableGame, SeparableBargainingGame, IMPROVEMENT_TOL};
use crate::geometry::{dot, is_pareto_optimal, planar, FeasibleSet, PayoffVector, PolySumLp, MEMBERSHIP_TOL};

/// Nonnegative weights summing to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SolutionWeights(Vec<f64>);

impl SolutionWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Empty("weights"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Invalid("weights must be nonnegative".into()));
        }
        let s: f64 = weights.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::Invalid(format!("weights sum to {s}, not 1")));
        }
        Ok(Self(weights))
    }

    /// Rescales nonnegative values to sum to one.
    pub fn normalized(values: &[f64]) -> Result<Self> {
        let s: f64 = values.iter().sum();
        if !(s > 0.0) {
            return Err(Error::Degenerate("weights have no positive mass".into()));
        }
        Self::new(values.iter().map(|v| v / s).collect())
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl TryFrom<Vec<f64>> for SolutionWeights {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SolutionWeights> for Vec<f64> {
    fn from(w: SolutionWeights) -> Self {
        w.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionReport {
    pub point: PayoffVector,
    /// Weighted log gain; `null` in JSON when some weighted player gains nothing.
    #[serde(with = "objective_serde")]
    pub objective: f64,
    pub gains: PayoffVector,
    pub iterations: usize,
    pub converged: bool,
    pub individually_rational: bool,
    /// Optimality gap of the final iterate (zero for closed-form answers).
    pub gap: f64,
}

mod objective_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NEG_INFINITY))
    }
}

impl SolutionReport {
    fn new(point: Vec<f64>, d: &[f64], objective: f64, iterations: usize, converged: bool, gap: f64) -> Self {
        let gains: Vec<f64> = point.iter().zip(d).map(|(x, y)| x - y).collect();
        let individually_rational = gains.iter().all(|g| *g >= -1e-9);
        Self {
            point: PayoffVector::new(point).expect("finite solution"),
            objective,
            gains: PayoffVector::new(gains).expect("finite gains"),
            iterations,
            converged,
            individually_rational,
            gap,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NbsOptions {
    /// Stop when the duality gap falls below this.
    pub gap_tol: f64,
    pub max_iter: usize,
    /// Treat positively weighted coordinates that admit no strict gain as weightless.
    pub drop_unimprovable: bool,
}

impl Default for NbsOptions {
    fn default() -> Self {
        Self { gap_tol: 1e-12, max_iter: 10_000, drop_unimprovable: false }
    }
}

fn check_inputs(f: &FeasibleSet, d: &[f64]) -> Result<()> {
    if d.len() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: d.len() });
    }
    if d.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("disagreement point"));
    }
    Ok(())
}

fn log_objective(x: &[f64], d: &[f64], w: &[f64]) -> f64 {
    x.iter()
        .zip(d)
        .zip(w)
        .filter(|(_, w)| **w > 0.0)
        .map(|((x, d), w)| if x > d { w * (x - d).ln() } else { f64::NEG_INFINITY })
        .sum()
}

/// Weighted Nash bargaining solution with default options.
pub fn nbs(f: &FeasibleSet, d: &[f64], w: &SolutionWeights) -> Result<SolutionReport> {
    nbs_with(f, d, w, &NbsOptions::default())
}

/// Maximizer of `sum_i w_i log(x_i - d_i)` over the feasible points with
/// `x_j >= d_j` for every weightless coordinate `j`.
pub fn nbs_with(f: &FeasibleSet, d: &[f64], w: &SolutionWeights, opts: &NbsOptions) -> Result<SolutionReport> {
    check_inputs(f, d)?;
    let n = f.dim();
    if w.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: w.dim() });
    }
    if !f.contains(d, MEMBERSHIP_TOL)? {
        return Err(Error::OutsideSet);
    }
    let mut weights = w.as_slice().to_vec();
    if opts.drop_unimprovable {
        for i in 0..n {
            if weights[i] > 0.0 && !improvable(f, d, i)? {
                weights[i] = 0.0;
            }
        }
        if weights.iter().all(|v| *v == 0.0) {
            return Err(Error::NoStrictImprovement);
        }
        let s: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|v| *v /= s);
    }
    let active: Vec<usize> = (0..n).filter(|&i| weights[i] > 0.0).collect();
    let floor: Vec<usize> = (0..n).filter(|&i| weights[i] == 0.0).collect();
    let (t, start) = f.max_min_gain_floor(d, &active, &floor)?;
    if !(t > IMPROVEMENT_TOL) {
        return Err(Error::NoStrictImprovement);
    }
    if active.len() == 1 {
        let i = active[0];
        let lower: Vec<Option<f64>> = (0..n).map(|j| if j == i { None } else { Some(d[j]) }).collect();
        let (_, x) = f.max_coordinate(i, &lower)?.ok_or(Error::NoStrictImprovement)?;
        let x = x.into_inner();
        return Ok(SolutionReport::new(x.clone(), d, log_objective(&x, d, &weights), 1, true, 0.0));
    }
    if n == 2 {
        let x = planar::nbs(f, d, [weights[0], weights[1]]);
        let gap = fw_gap(f, &x, d, &weights).unwrap_or(0.0);
        return Ok(SolutionReport::new(x.clone(), d, log_objective(&x, d, &weights), 1, true, gap));
    }
    let lower: Vec<Option<f64>> = (0..n).map(|j| if weights[j] == 0.0 { Some(d[j]) } else { None }).collect();
    let x0: Vec<f64> = d.iter().zip(&start).map(|(a, b)| a + 0.5 * (b - a)).collect();
    let polytope = f.polytope_summands().is_some();
    let (x, iters, gap) = frank_wolfe(f, d, &weights, &lower, vec![(d.to_vec(), 0.5), (start, 0.5)], x0, polytope, opts)?;
    Ok(SolutionReport::new(x.clone(), d, log_objective(&x, d, &weights), iters, gap <= opts.gap_tol, gap))
}

fn improvable(f: &FeasibleSet, d: &[f64], i: usize) -> Result<bool> {
    let n = f.dim();
    let lower: Vec<Option<f64>> = (0..n).map(|j| if j == i { None } else { Some(d[j]) }).collect();
    Ok(match f.max_coordinate(i, &lower)? {
        Some((v, _)) => v > d[i] + IMPROVEMENT_TOL,
        None => false,
    })
}

fn gradient(x: &[f64], d: &[f64], w: &[f64]) -> Vec<f64> {
    x.iter().zip(d).zip(w).map(|((x, d), w)| if *w > 0.0 { w / (x - d) } else { 0.0 }).collect()
}

fn fw_gap(f: &FeasibleSet, x: &[f64], d: &[f64], w: &[f64]) -> Option<f64> {
    let g = gradient(x, d, w);
    if g.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Some((f.support_value(&g) - dot(&g, x)).max(0.0))
}

/// Maximizer over `[0, g_max]` of the concave `phi(s) = f(x + s v)`.
fn line_search(x: &[f64], v: &[f64], d: &[f64], w: &[f64], g_max: f64) -> f64 {
    let mut hi = g_max;
    for i in 0..x.len() {
        if w[i] > 0.0 && v[i] < 0.0 {
            hi = hi.min((x[i] - d[i]) / -v[i]);
        }
    }
    let deriv = |s: f64| -> f64 {
        (0..x.len()).filter(|&i| w[i] > 0.0).map(|i| w[i] * v[i] / (x[i] - d[i] + s * v[i])).sum()
    };
    if deriv(0.0) <= 0.0 {
        return 0.0;
    }
    if hi >= g_max && deriv(g_max) >= 0.0 {
        return g_max;
    }
    let (mut lo, mut up) = (0.0, hi);
    for _ in 0..100 {
        let mid = 0.5 * (lo + up);
        if mid <= lo || mid >= up {
            break;
        }
        if deriv(mid) > 0.0 {
            lo = mid;
        } else {
            up = mid;
        }
    }
    lo
}

fn same_point(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-13 * (1.0 + x.abs().max(y.abs())))
}

/// Value of `sum_i w_i log(y_i) + mu sum_k log(lambda_k)` with `y = P lambda - d`.
fn barrier_value(atoms: &[Vec<f64>], lambda: &[f64], d: &[f64], w: &[f64], mu: f64) -> f64 {
    let x = combine(atoms, lambda);
    if lambda.iter().any(|l| *l <= 0.0) {
        return f64::NEG_INFINITY;
    }
    log_objective(&x, d, w) + mu * lambda.iter().map(|l| l.ln()).sum::<f64>()
}

fn combine(atoms: &[Vec<f64>], lambda: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; atoms[0].len()];
    for (a, l) in atoms.iter().zip(lambda) {
        for (xi, ai) in x.iter_mut().zip(a) {
            *xi += l * ai;
        }
    }
    x
}

/// Maximize the objective over the hull of `atoms` by barrier Newton steps on
/// the convex weights, starting from the strictly feasible `lambda`.
fn polish(atoms: &[Vec<f64>], mut lambda: Vec<f64>, d: &[f64], w: &[f64]) -> Option<Vec<f64>> {
    let m = atoms.len();
    let n = d.len();
    let mut mu = 1e-4;
    while mu > 1e-17 {
        for _ in 0..60 {
            let x = combine(atoms, &lambda);
            let y: Vec<f64> = x.iter().zip(d).map(|(x, d)| x - d).collect();
            let mut kkt = DMatrix::<f64>::zeros(m + 1, m + 1);
            let mut rhs = DVector::<f64>::zeros(m + 1);
            for k in 0..m {
                let mut g = mu / lambda[k];
                for i in 0..n {
                    if w[i] > 0.0 {
                        g += w[i] / y[i] * atoms[k][i];
                    }
                }
                rhs[k] = -g;
                for l in 0..=k {
                    let mut h: f64 = (0..n).filter(|&i| w[i] > 0.0).map(|i| w[i] / (y[i] * y[i]) * atoms[k][i] * atoms[l][i]).sum();
                    if k == l {
                        h += mu / (lambda[k] * lambda[k]);
                    }
                    kkt[(k, l)] = -h;
                    kkt[(l, k)] = -h;
                }
                kkt[(k, m)] = 1.0;
                kkt[(m, k)] = 1.0;
            }
            let step = kkt.lu().solve(&rhs)?;
            let delta: Vec<f64> = (0..m).map(|k| step[k]).collect();
            let slope: f64 = -(0..m).map(|k| rhs[k] * delta[k]).sum::<f64>();
            if !(slope > 1e-24) {
                break;
            }
            let mut t: f64 = 1.0;
            for k in 0..m {
                if delta[k] < 0.0 {
                    t = t.min(-0.99 * lambda[k] / delta[k]);
                }
            }
            let base = barrier_value(atoms, &lambda, d, w, mu);
            let mut moved = false;
            for _ in 0..60 {
                let trial: Vec<f64> = lambda.iter().zip(&delta).map(|(l, s)| l + t * s).collect();
                if barrier_value(atoms, &trial, d, w, mu) >= base + 1e-4 * t * slope {
                    lambda = trial;
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
            if !moved {
                break;
            }
        }
        mu *= 0.1;
    }
    Some(lambda)
}

/// Frank-Wolfe over the set. On polytopes each vertex step is followed by an
/// exact re-optimization over the hull of the vertices found so far.
#[allow(clippy::too_many_arguments)]
fn frank_wolfe(
    f: &FeasibleSet,
    d: &[f64],
    w: &[f64],
    lower: &[Option<f64>],
    mut atoms: Vec<(Vec<f64>, f64)>,
    mut x: Vec<f64>,
    polytope: bool,
    opts: &NbsOptions,
) -> Result<(Vec<f64>, usize, f64)> {
    let mut gap = f64::INFINITY;
    let corrective = polytope && lower.iter().all(Option::is_none);
    for it in 0..opts.max_iter {
        let g = gradient(&x, d, w);
        let (_, s) = f
            .max_linear(&g, lower)?
            .ok_or_else(|| Error::Lp("linear oracle infeasible".into()))?;
        let gx = dot(&g, &x);
        gap = (dot(&g, &s) - gx).max(0.0);
        if gap <= opts.gap_tol {
            return Ok((x, it, gap));
        }
        let v: Vec<f64> = s.iter().zip(&x).map(|(s, x)| s - x).collect();
        let step = line_search(&x, &v, d, w, 1.0);
        if corrective {
            let known = atoms.iter().any(|a| same_point(&a.0, &s));
            if !known {
                atoms.iter_mut().for_each(|a| a.1 *= 1.0 - step.min(0.5));
                atoms.push((s, step.clamp(1e-3, 0.5)));
                let total: f64 = atoms.iter().map(|a| a.1).sum();
                atoms.iter_mut().for_each(|a| a.1 /= total);
            }
            let points: Vec<Vec<f64>> = atoms.iter().map(|a| a.0.clone()).collect();
            let start: Vec<f64> = atoms.iter().map(|a| a.1).collect();
            let feasible = combine(&points, &start).iter().zip(d).zip(w).all(|((x, d), w)| *w == 0.0 || x > d);
            if let Some(lambda) = polish(&points, start, d, w).filter(|_| feasible) {
                let candidate = combine(&points, &lambda);
                if log_objective(&candidate, d, w) >= log_objective(&x, d, w) {
                    for (a, l) in atoms.iter_mut().zip(&lambda) {
                        a.1 = *l;
                    }
                    atoms.retain(|a| a.1 > 1e-12);
                    let total: f64 = atoms.iter().map(|a| a.1).sum();
                    atoms.iter_mut().for_each(|a| a.1 /= total);
                    let points: Vec<Vec<f64>> = atoms.iter().map(|a| a.0.clone()).collect();
                    let kept = combine(&points, &atoms.iter().map(|a| a.1).collect::<Vec<_>>());
                    x = if log_objective(&kept, d, w) >= log_objective(&x, d, w) { kept } else { candidate };
                    continue;
                }
            }
            if known && step == 0.0 {
                return Ok((x, it + 1, gap));
            }
        }
        for (xi, vi) in x.iter_mut().zip(&v) {
            *xi += step * vi;
        }
        if step == 0.0 {
            return Ok((x, it + 1, gap));
        }
    }
    Ok((x, opts.max_iter, gap))
}

/// Kalai-Smorodinsky solution: the last feasible point on the segment from `d` to the ideal point.
pub fn ksbs(f: &FeasibleSet, d: &[f64]) -> Result<SolutionReport> {
    check_inputs(f, d)?;
    let u = ideal_point(f, d)?;
    let v: Vec<f64> = u.iter().zip(d).map(|(a, b)| a - b).collect();
    let s = f.ray_exit(d, &v, 1.0)?;
    let x: Vec<f64> = d.iter().zip(&v).map(|(a, b)| a + s * b).collect();
    let w = SolutionWeights::uniform(x.len());
    Ok(SolutionReport::new(x.clone(), d, log_objective(&x, d, w.as_slice()), 1, true, 0.0))
}

/// Largest value of each coordinate over feasible points that weakly dominate `d`.
pub fn ideal_point(f: &FeasibleSet, d: &[f64]) -> Result<Vec<f64>> {
    check_inputs(f, d)?;
    let n = f.dim();
    let coords: Vec<usize> = (0..n).collect();
    let (t, _) = f.max_min_gain(d, &coords)?;
    if !(t > IMPROVEMENT_TOL) {
        return Err(Error::NoStrictImprovement);
    }
    let mut u = Vec::with_capacity(n);
    for i in 0..n {
        let lower: Vec<Option<f64>> = (0..n).map(|j| if j == i { None } else { Some(d[j]) }).collect();
        let (v, _) = f.max_coordinate(i, &lower)?.ok_or(Error::NoStrictImprovement)?;
        if v - d[i] <= IMPROVEMENT_TOL {
            return Err(Error::Degenerate(format!("ideal gain of coordinate {i} is zero")));
        }
        u.push(v);
    }
    Ok(u)
}

/// Maximizer of the sum of utilities normalized so that `d` maps to 0 and the ideal point to 1.
pub fn armstrong_solution(f: &FeasibleSet, d: &[f64]) -> Result<SolutionReport> {
    let u = ideal_point(f, d)?;
    let dir: Vec<f64> = u.iter().zip(d).map(|(a, b)| 1.0 / (a - b)).collect();
    let (_, x) = f.support(&dir)?;
    let x = x.into_inner();
    let objective = x.iter().zip(d).zip(&dir).map(|((x, d), s)| (x - d) * s).sum();
    Ok(SolutionReport::new(x, d, objective, 1, true, 0.0))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarianceConvention {
    /// `sum_x (u(x) - mu)^2` scaled as if every outcome counted once.
    #[default]
    Unaveraged,
    /// Standard deviation under the reference distribution.
    StdDev,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizedOutcome {
    pub profile: Vec<usize>,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceCompromise {
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
    pub table: Vec<NormalizedOutcome>,
    /// Index into `table` of the outcome with the largest normalized sum.
    pub chosen: usize,
}

impl VarianceCompromise {
    pub fn chosen_outcome(&self) -> &NormalizedOutcome {
        &self.table[self.chosen]
    }
}

/// Normalize each player's utility by mean and spread under `reference` (a
/// distribution over pure profiles in enumeration order, uniform by default) and
/// pick the pure outcome with the largest normalized sum.
pub fn variance_normalized_compromise(
    g: &NormalFormSeparableGame,
    reference: Option<&[f64]>,
    convention: VarianceConvention,
) -> Result<VarianceCompromise> {
    let profiles: Vec<Vec<usize>> = pure_profiles(&g.action_counts()).collect();
    let k = profiles.len();
    let q: Vec<f64> = match reference {
        Some(q) => {
            if q.len() != k {
                return Err(Error::DimensionMismatch { expected: k, got: q.len() });
            }
            if q.iter().any(|v| !(*v >= 0.0)) || (q.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                return Err(Error::Invalid("reference must be a probability distribution".into()));
            }
            q.to_vec()
        }
        None => vec![1.0 / k as f64; k],
    };
    let n = g.players();
    let payoffs: Vec<Vec<f64>> = profiles.iter().map(|p| g.pure_payoffs(p)).collect();
    let means: Vec<f64> = (0..n).map(|i| payoffs.iter().zip(&q).map(|(u, q)| q * u[i]).sum()).collect();
    let scales = (0..n)
        .map(|i| {
            let var: f64 = payoffs.iter().zip(&q).map(|(u, q)| q * (u[i] - means[i]).powi(2)).sum();
            let s = match convention {
                VarianceConvention::Unaveraged => k as f64 * var,
                VarianceConvention::StdDev => var.sqrt(),
            };
            if s <= 0.0 {
                Err(Error::Degenerate(format!("player {i} has zero variance")))
            } else {
                Ok(s)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let table: Vec<NormalizedOutcome> = profiles
        .into_iter()
        .zip(&payoffs)
        .map(|(profile, u)| NormalizedOutcome {
            profile,
            values: (0..n).map(|i| (u[i] - means[i]) / scales[i]).collect(),
        })
        .collect();
    let mut chosen = 0;
    let total = |o: &NormalizedOutcome| o.values.iter().sum::<f64>();
    for (idx, o) in table.iter().enumerate() {
        if total(o) > total(&table[chosen]) {
            chosen = idx;
        }
    }
    Ok(VarianceCompromise { means, scales, table, chosen })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportingWeights {
    pub weights: SolutionWeights,
    /// Whether the supporting weights are unique.
    pub unique: bool,
}

const EXCESS_TOL: f64 = 1e-7;

/// Normalized weights `nu` with `<nu, x> = support(F, nu)` at a Pareto optimal `x`.
///
/// At a smooth point or on the relative interior of a facet the weights are
/// unique. At a kink the center of the supporting cone is returned and
/// flagged as non-unique.
pub fn weights_from_point(f: &FeasibleSet, x: &[f64]) -> Result<SupportingWeights> {
    check_inputs(f, x)?;
    if !is_pareto_optimal(f, x, 1e-6)? {
        return Err(Error::NotParetoOptimal);
    }
    if let Some(parts) = f.polytope_summands() {
        return polytope_weights(&parts, x);
    }
    if f.dim() == 2 {
        return planar_weights(f, x);
    }
    Err(Error::Unsupported("supporting weights of smooth sets beyond the plane".into()))
}

fn angle_weights(th: f64) -> SolutionWeights {
    SolutionWeights::normalized(&[th.cos().max(0.0), th.sin().max(0.0)]).expect("nonzero weights")
}

fn planar_weights(f: &FeasibleSet, x: &[f64]) -> Result<SupportingWeights> {
    let scale = 1.0 + x[0].abs().max(x[1].abs());
    let excess = |th: f64| {
        let u = [th.cos(), th.sin()];
        f.support_value(&u) - dot(&u, x)
    };
    const GRID: usize = 2000;
    let step = FRAC_PI_2 / GRID as f64;
    let mut best = 0;
    let mut best_v = f64::INFINITY;
    for k in 0..=GRID {
        let v = excess(k as f64 * step);
        if v < best_v {
            best_v = v;
            best = k;
        }
    }
    let (mut a, mut b) = (((best as f64) - 1.0).max(0.0) * step, ((best + 1) as f64 * step).min(FRAC_PI_2));
    let gr = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let c = b - gr * (b - a);
        let e = a + gr * (b - a);
        if excess(c) < excess(e) {
            b = e;
        } else {
            a = c;
        }
    }
    let th = 0.5 * (a + b);
    let zero = |t: f64| excess(t) <= 1e-12 * scale;
    if excess(th) > EXCESS_TOL * scale {
        return Err(Error::NotOnFrontier);
    }
    let probe = 1e-4;
    let left_flat = th - probe > 0.0 && zero(th - probe);
    let right_flat = th + probe < FRAC_PI_2 && zero(th + probe);
    if !left_flat && !right_flat {
        return Ok(SupportingWeights { weights: angle_weights(th), unique: true });
    }
    let edge = |from: f64, to: f64| {
        if zero(to) {
            return to;
        }
        let (mut inside, mut outside) = (from, to);
        for _ in 0..100 {
            let mid = 0.5 * (inside + outside);
            if zero(mid) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        inside
    };
    let lo = edge(th, 0.0);
    let hi = edge(th, FRAC_PI_2);
    Ok(SupportingWeights { weights: angle_weights(0.5 * (lo + hi)), unique: false })
}

/// Extreme points of the normal cone of a polytope sum at `x`, intersected
/// with the simplex, found by minimizing and maximizing each coordinate.
pub(crate) fn normal_cone_extremes(parts: &[&crate::geometry::PolytopeSet], x: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n = x.len();
    // sum_k z_k <= <w, x>, z_k >= <w, g> for every generator g of summand k.
    let solve = |objective: &[f64], dir: OptimizationDirection| -> Result<Vec<f64>> {
        let mut p = Problem::new(dir);
        let w: Vec<_> = objective.iter().map(|c| p.add_var(*c, (0.0, 1.0))).collect();
        let ones: Vec<_> = w.iter().map(|v| (*v, 1.0)).collect();
        p.add_constraint(ones.as_slice(), ComparisonOp::Eq, 1.0);
        let mut total = Vec::new();
        for part in parts {
            let z = p.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY));
            for g in part.generators() {
                let mut e: Vec<_> = w.iter().zip(g).map(|(v, gi)| (*v, -gi)).collect();
                e.push((z, 1.0));
                p.add_constraint(e.as_slice(), ComparisonOp::Ge, 0.0);
            }
            total.push((z, 1.0));
        }
        for (v, xi) in w.iter().zip(x) {
            total.push((*v, -xi));
        }
        p.add_constraint(total.as_slice(), ComparisonOp::Le, 1e-9 * (1.0 + x.iter().map(|v| v.abs()).sum::<f64>()));
        let sol = p
            .solve()
            .map_err(|e| match e {
                microlp::Error::Infeasible => Error::NotParetoOptimal,
                e => Error::Lp(e.to_string()),
            })?
            .into_solution()
            .map_err(|e| Error::Lp(format!("interrupted: {e:?}")))?;
        Ok(w.iter().map(|v| sol.var_value(*v).max(0.0)).collect())
    };
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        let mut c = vec![0.0; n];
        c[i] = 1.0;
        out.push(solve(&c, OptimizationDirection::Minimize)?);
        out.push(solve(&c, OptimizationDirection::Maximize)?);
    }
    Ok(out)
}

fn polytope_weights(parts: &[&crate::geometry::PolytopeSet], x: &[f64]) -> Result<SupportingWeights> {
    let n = x.len();
    let ext = normal_cone_extremes(parts, x)?;
    let mut center = vec![0.0; n];
    let mut unique = true;
    for (i, pair) in ext.chunks(2).enumerate() {
        if pair[1][i] - pair[0][i] > 1e-7 {
            unique = false;
        }
        for j in 0..n {
            center[j] += (pair[0][j] + pair[1][j]) / (2 * n) as f64;
        }
    }
    Ok(SupportingWeights { weights: SolutionWeights::normalized(&center)?, unique })
}

const DECOMPOSE_TOL: f64 = 1e-6;

/// Split a Pareto optimal `x` into per-player contributions that each maximize
/// the common supporting weights; flat faces are resolved towards their barycenters.
pub fn decompose(g: &SeparableBargainingGame, x: &[f64]) -> Result<Vec<PayoffVector>> {
    let joint = g.joint_feasible_set();
    let sw = weights_from_point(&joint, x)?;
    let w = sw.weights.as_slice();
    let n = x.len();
    let sets = g.individual_sets();
    let mut out: Vec<Option<Vec<f64>>> = vec![None; sets.len()];
    let mut faces = Vec::new();
    let mut face_owner = Vec::new();
    let mut target = x.to_vec();
    for (k, s) in sets.iter().enumerate() {
        match s.polytope_summands() {
            Some(parts) if parts.len() == 1 => {
                let p = parts[0];
                let idx = p.argmax_face(w, 1e-9);
                let gens: Vec<Vec<f64>> = idx.iter().map(|&i| p.generators()[i].clone()).collect();
                faces.push(crate::geometry::PolytopeSet::new(gens)?);
                face_owner.push(k);
            }
            _ => {
                let (_, p) = s.support(w)?;
                for (t, v) in target.iter_mut().zip(p.as_slice()) {
                    *t -= v;
                }
                out[k] = Some(p.into_inner());
            }
        }
    }
    if !faces.is_empty() {
        let refs: Vec<&crate::geometry::PolytopeSet> = faces.iter().collect();
        let mut lp = PolySumLp::new(&refs, OptimizationDirection::Minimize, None);
        for i in 0..n {
            let e = lp.coord(i);
            lp.problem.add_constraint(e.as_slice(), ComparisonOp::Ge, target[i] - 1e-9);
            lp.problem.add_constraint(e.as_slice(), ComparisonOp::Le, target[i] + 1e-9);
        }
        for (k, face) in faces.iter().enumerate() {
            let m = face.generators().len() as f64;
            for i in 0..n {
                let bary: f64 = face.generators().iter().map(|g| g[i]).sum::<f64>() / m;
                let t = lp.problem.add_var(1.0, (0.0, f64::INFINITY));
                let mut e = lp.part_coord(k, i);
                e.push((t, -1.0));
                lp.problem.add_constraint(e.as_slice(), ComparisonOp::Le, bary);
                let mut e = lp.part_coord(k, i);
                e.push((t, 1.0));
                lp.problem.add_constraint(e.as_slice(), ComparisonOp::Ge, bary);
            }
        }
        let sol = lp
            .solve()?
            .ok_or_else(|| Error::NonConvergence("no decomposition matches the point".into()))?;
        for (k, p) in lp.summand_points(&sol).into_iter().enumerate() {
            out[face_owner[k]] = Some(p);
        }
    }
    let parts: Vec<Vec<f64>> = out.into_iter().map(|p| p.expect("every summand resolved")).collect();
    let residual = (0..n)
        .map(|i| (parts.iter().map(|p| p[i]).sum::<f64>() - x[i]).abs())
        .fold(0.0, f64::max);
    if residual > DECOMPOSE_TOL {
        return Err(Error::NonConvergence(format!("decomposition residual {residual:e}")));
    }
    parts.into_iter().map(PayoffVector::new).collect()
}
