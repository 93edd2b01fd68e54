//! Convex feasible sets: polytopes, smooth planar sets and lazy Minkowski sums.
//!
//! Every set is queried through its support function. Polytope sums fall back
//! to linear programs for membership and constrained maxima; planar sets with
//! smooth pieces use frontier walks parameterized by the direction angle.

mod lp;
mod parametric;
pub(crate) mod planar;
mod sampled;

use serde::{Deserialize, Serialize};
use std::ops::Deref;

use crate::error::{Error, Result};

pub use parametric::{CostFn, ParametricFrontierSet, ParametricKind};
pub(crate) use lp::PolySumLp;

/// Tolerance used when deciding membership of lazy sums.
pub const MEMBERSHIP_TOL: f64 = 1e-7;

/// A finite vector of utilities, one entry per player or per type.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PayoffVector(Vec<f64>);

impl PayoffVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("payoff vector"));
        }
        Ok(Self(values))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for PayoffVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for PayoffVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PayoffVector> for Vec<f64> {
    fn from(p: PayoffVector) -> Vec<f64> {
        p.0
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

fn check_direction(w: &[f64]) -> Result<()> {
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("direction"));
    }
    if w.iter().all(|v| *v == 0.0) {
        return Err(Error::ZeroDirection);
    }
    Ok(())
}

/// Convex hull of finitely many generators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolytopeSet {
    generators: Vec<Vec<f64>>,
    dim: usize,
}

impl PolytopeSet {
    pub fn new(generators: Vec<Vec<f64>>) -> Result<Self> {
        let first = generators.first().ok_or(Error::Empty("polytope generators"))?;
        let dim = first.len();
        if dim == 0 {
            return Err(Error::Invalid("polytope dimension must be positive".into()));
        }
        for g in &generators {
            check_dim(dim, g.len())?;
            if g.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("polytope generator"));
            }
        }
        Ok(Self { generators, dim })
    }

    pub fn point(p: Vec<f64>) -> Result<Self> {
        Self::new(vec![p])
    }

    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub(crate) fn argmax(&self, w: &[f64]) -> (f64, usize) {
        let mut best = (f64::NEG_INFINITY, 0);
        for (k, g) in self.generators.iter().enumerate() {
            let v = dot(w, g);
            if v > best.0 {
                best = (v, k);
            }
        }
        best
    }

    /// Indices of generators whose value in direction `w` is within `tol` of the maximum.
    pub(crate) fn argmax_face(&self, w: &[f64], tol: f64) -> Vec<usize> {
        let (best, _) = self.argmax(w);
        let scale = 1.0 + best.abs();
        (0..self.generators.len())
            .filter(|&k| dot(w, &self.generators[k]) >= best - tol * scale)
            .collect()
    }

    fn scaled(&self, factors: &[f64]) -> Self {
        let generators = self
            .generators
            .iter()
            .map(|g| g.iter().zip(factors).map(|(x, f)| x * f).collect())
            .collect();
        Self { generators, dim: self.dim }
    }

    /// Vertices of a planar polytope in counter-clockwise order (monotone chain).
    pub fn planar_hull(&self) -> Result<Vec<Vec<f64>>> {
        check_dim(2, self.dim)?;
        let mut pts: Vec<[f64; 2]> = self.generators.iter().map(|g| [g[0], g[1]]).collect();
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        pts.dedup_by(|a, b| (a[0] - b[0]).abs() < 1e-14 && (a[1] - b[1]).abs() < 1e-14);
        if pts.len() <= 2 {
            return Ok(pts.into_iter().map(|p| p.to_vec()).collect());
        }
        let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
            (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
        };
        let mut lower: Vec<[f64; 2]> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 1e-14 {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<[f64; 2]> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 1e-14 {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        Ok(lower.into_iter().map(|p| p.to_vec()).collect())
    }
}

/// A compact convex set of payoff vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum FeasibleSet {
    Polytope(PolytopeSet),
    Parametric(ParametricFrontierSet),
    MinkowskiSum { summands: Vec<FeasibleSet> },
    /// Image `{M y : y in base}` of a planar set; `matrix` has one row per output coordinate.
    LinearImage { base: ParametricFrontierSet, matrix: Vec<[f64; 2]> },
}

impl FeasibleSet {
    pub fn polytope(generators: Vec<Vec<f64>>) -> Result<Self> {
        Ok(Self::Polytope(PolytopeSet::new(generators)?))
    }

    pub fn point(p: Vec<f64>) -> Result<Self> {
        Self::polytope(vec![p])
    }

    /// `{(s1 y1, s2 y2) : y >= 0, y1^2 + y2^2 <= 1}`.
    pub fn disk(scale: [f64; 2]) -> Result<Self> {
        ParametricFrontierSet::build(ParametricKind::DiskQuadratic, scale)
    }

    /// Convex hull of `(log max(q1,1), log max(q2,1))` over resource splits `q1 + q2 <= r`,
    /// with axes scaled by `scale`.
    pub fn log_resource(r: f64, scale: [f64; 2]) -> Result<Self> {
        ParametricFrontierSet::build(ParametricKind::LogExponential { r }, scale)
    }

    /// `{x >= 0 : c1(x1) + c2(x2) <= budget}` with increasing convex costs.
    pub fn budget(budget: f64, costs: [CostFn; 2]) -> Result<Self> {
        ParametricFrontierSet::build(ParametricKind::CustomLevel { budget, costs }, [1.0, 1.0])
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Polytope(p) => p.dim(),
            Self::Parametric(_) => 2,
            Self::MinkowskiSum { summands } => summands[0].dim(),
            Self::LinearImage { matrix, .. } => matrix.len(),
        }
    }

    /// Maximum of `<w, x>` over the set and one maximizer.
    pub fn support(&self, w: &[f64]) -> Result<(f64, PayoffVector)> {
        check_dim(self.dim(), w.len())?;
        check_direction(w)?;
        let (v, x) = self.support_raw(w);
        Ok((v, PayoffVector(x)))
    }

    pub(crate) fn support_raw(&self, w: &[f64]) -> (f64, Vec<f64>) {
        match self {
            Self::Polytope(p) => {
                let (v, k) = p.argmax(w);
                (v, p.generators[k].clone())
            }
            Self::Parametric(p) => p.support(w),
            Self::MinkowskiSum { summands } => {
                let mut total = 0.0;
                let mut point = vec![0.0; w.len()];
                for s in summands {
                    let (v, x) = s.support_raw(w);
                    total += v;
                    for (a, b) in point.iter_mut().zip(&x) {
                        *a += b;
                    }
                }
                (total, point)
            }
            Self::LinearImage { base, matrix } => {
                let mut om = [0.0; 2];
                for (row, wi) in matrix.iter().zip(w) {
                    om[0] += row[0] * wi;
                    om[1] += row[1] * wi;
                }
                let (v, y) = base.support(&om);
                let x = matrix.iter().map(|row| row[0] * y[0] + row[1] * y[1]).collect();
                (v, x)
            }
        }
    }

    pub(crate) fn support_value(&self, w: &[f64]) -> f64 {
        self.support_raw(w).0
    }

    /// Polytope summands when the set is a polytope or a sum of polytopes.
    pub(crate) fn polytope_summands(&self) -> Option<Vec<&PolytopeSet>> {
        match self {
            Self::Polytope(p) => Some(vec![p]),
            Self::Parametric(_) | Self::LinearImage { .. } => None,
            Self::MinkowskiSum { summands } => {
                let mut out = Vec::new();
                for s in summands {
                    out.extend(s.polytope_summands()?);
                }
                Some(out)
            }
        }
    }

    /// Image under the diagonal linear map `x -> (f_i x_i)`.
    pub fn scaled(&self, factors: &[f64]) -> Result<Self> {
        check_dim(self.dim(), factors.len())?;
        if factors.iter().any(|f| !f.is_finite()) {
            return Err(Error::NonFinite("scale factors"));
        }
        Ok(match self {
            Self::Polytope(p) => Self::Polytope(p.scaled(factors)),
            Self::Parametric(p) => p.scaled([factors[0], factors[1]])?,
            Self::MinkowskiSum { summands } => Self::MinkowskiSum {
                summands: summands.iter().map(|s| s.scaled(factors)).collect::<Result<_>>()?,
            },
            Self::LinearImage { base, matrix } => Self::LinearImage {
                base: base.clone(),
                matrix: matrix.iter().zip(factors).map(|(r, f)| [r[0] * f, r[1] * f]).collect(),
            },
        })
    }

    /// Image under the linear map `x -> M x`, with `matrix` given row by row.
    pub fn linear_image(&self, matrix: &[Vec<f64>]) -> Result<Self> {
        let n = self.dim();
        if matrix.is_empty() {
            return Err(Error::Empty("matrix rows"));
        }
        for row in matrix {
            check_dim(n, row.len())?;
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("matrix"));
            }
        }
        let apply = |x: &[f64]| -> Vec<f64> { matrix.iter().map(|row| dot(row, x)).collect() };
        Ok(match self {
            Self::Polytope(p) => Self::Polytope(PolytopeSet {
                generators: p.generators.iter().map(|g| apply(g)).collect(),
                dim: matrix.len(),
            }),
            Self::Parametric(p) => {
                let diagonal = matrix.len() == 2 && matrix[0][1] == 0.0 && matrix[1][0] == 0.0;
                if diagonal {
                    p.scaled([matrix[0][0], matrix[1][1]])?
                } else {
                    Self::LinearImage { base: p.clone(), matrix: matrix.iter().map(|r| [r[0], r[1]]).collect() }
                }
            }
            Self::MinkowskiSum { summands } => Self::MinkowskiSum {
                summands: summands.iter().map(|s| s.linear_image(matrix)).collect::<Result<_>>()?,
            },
            Self::LinearImage { base, matrix: inner } => Self::LinearImage {
                base: base.clone(),
                matrix: matrix
                    .iter()
                    .map(|row| {
                        let mut r = [0.0; 2];
                        for (c, m) in row.iter().zip(inner) {
                            r[0] += c * m[0];
                            r[1] += c * m[1];
                        }
                        r
                    })
                    .collect(),
            },
        })
    }

    /// Translate the set by `y`.
    pub fn translated(&self, y: &[f64]) -> Result<Self> {
        minkowski_sum(vec![self.clone(), Self::point(y.to_vec())?])
    }

    /// Signed level of a point: at most zero inside, positive outside.
    ///
    /// For polytope sums this is the infinity-norm distance to the set; for
    /// planar sets it is the largest `<u, x> - h(u)` over unit directions.
    pub fn level(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("point"));
        }
        if let Some(parts) = self.polytope_summands() {
            return lp::distance_inf(&parts, x);
        }
        match self {
            Self::Parametric(p) => Ok(p.level(x)),
            _ if x.len() == 2 => planar::support_distance(self, x),
            _ => Ok(sampled::support_distance(self, x)),
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        if !(tol >= 0.0) {
            return Err(Error::Invalid("tolerance must be nonnegative".into()));
        }
        Ok(self.level(x)? <= tol)
    }

    /// Maximize coordinate `i` subject to `y_j >= lower_j` for every `j` with a bound.
    /// Returns `None` when the constraints cannot be met.
    pub fn max_coordinate(&self, i: usize, lower: &[Option<f64>]) -> Result<Option<(f64, PayoffVector)>> {
        let n = self.dim();
        check_dim(n, lower.len())?;
        if i >= n {
            return Err(Error::Invalid(format!("coordinate {i} out of range")));
        }
        if let Some(parts) = self.polytope_summands() {
            let mut w = vec![0.0; n];
            w[i] = 1.0;
            return Ok(lp::max_linear(&parts, &w, lower)?.map(|(v, x)| (v, PayoffVector(x))));
        }
        if n != 2 {
            return Err(Error::Unsupported("constrained maxima over smooth sets need a planar set".into()));
        }
        let j = 1 - i;
        let bound = lower[j];
        Ok(planar::max_coordinate(self, i, bound).map(|x| (x[i], PayoffVector(x))))
    }

    /// Maximize `min_{i in coords} (x_i - d_i)` over the set.
    pub fn max_min_gain(&self, d: &[f64], coords: &[usize]) -> Result<(f64, PayoffVector)> {
        check_dim(self.dim(), d.len())?;
        if coords.is_empty() {
            return Err(Error::Empty("coordinates"));
        }
        if let Some(parts) = self.polytope_summands() {
            let (t, x) = lp::max_min_gain(&parts, d, coords, &[])?;
            return Ok((t, PayoffVector(x)));
        }
        if self.dim() != 2 {
            let hull = sampled::inner_hull(self);
            let (t, x) = lp::max_min_gain(&[&hull], d, coords, &[])?;
            return Ok((t, PayoffVector(x)));
        }
        let x = if coords.len() == 1 {
            let i = coords[0];
            planar::max_coordinate(self, i, None).expect("unconstrained maximum exists")
        } else {
            planar::max_min_gain(self, d)
        };
        let t = coords.iter().map(|&i| x[i] - d[i]).fold(f64::INFINITY, f64::min);
        Ok((t, PayoffVector(x)))
    }

    /// Maximize `<w, x>` subject to `x_j >= lower_j` where bounded; `None` when infeasible.
    pub(crate) fn max_linear(&self, w: &[f64], lower: &[Option<f64>]) -> Result<Option<(f64, Vec<f64>)>> {
        if let Some(parts) = self.polytope_summands() {
            return lp::max_linear(&parts, w, lower);
        }
        if lower.iter().any(Option::is_some) {
            return Err(Error::Unsupported("bounded linear maxima need a polytope".into()));
        }
        Ok(Some(self.support_raw(w)))
    }

    /// `max_min_gain` that also keeps the `floor` coordinates at or above `d`.
    pub(crate) fn max_min_gain_floor(&self, d: &[f64], coords: &[usize], floor: &[usize]) -> Result<(f64, Vec<f64>)> {
        if floor.is_empty() {
            return self.max_min_gain(d, coords).map(|(t, x)| (t, x.0));
        }
        if let Some(parts) = self.polytope_summands() {
            return lp::max_min_gain(&parts, d, coords, floor);
        }
        if self.dim() == 2 && coords.len() == 1 {
            let i = coords[0];
            let mut lower = vec![None; 2];
            lower[1 - i] = Some(d[1 - i]);
            return match self.max_coordinate(i, &lower)? {
                Some((v, x)) => Ok((v - d[i], x.0)),
                None => Err(Error::NoStrictImprovement),
            };
        }
        Err(Error::Unsupported("floor constraints on smooth sets beyond the plane".into()))
    }

    /// Largest `s >= 0` with `o + s v` in the set, capped at `s_max`.
    pub fn ray_exit(&self, o: &[f64], v: &[f64], s_max: f64) -> Result<f64> {
        check_dim(self.dim(), o.len())?;
        check_dim(self.dim(), v.len())?;
        if let Some(parts) = self.polytope_summands() {
            return lp::ray_exit(&parts, o, v, s_max);
        }
        let inside = |s: f64| -> Result<bool> {
            let p: Vec<f64> = o.iter().zip(v).map(|(a, b)| a + s * b).collect();
            Ok(self.level(&p)? <= 1e-12)
        };
        if !inside(0.0)? {
            return Err(Error::OutsideSet);
        }
        if inside(s_max)? {
            return Ok(s_max);
        }
        let (mut lo, mut hi) = (0.0, s_max);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if inside(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }
}

/// Lazy Minkowski sum; nested sums are flattened.
pub fn minkowski_sum(sets: Vec<FeasibleSet>) -> Result<FeasibleSet> {
    let first = sets.first().ok_or(Error::Empty("sets to sum"))?;
    let dim = first.dim();
    for s in &sets {
        check_dim(dim, s.dim())?;
    }
    let mut summands = Vec::new();
    for s in sets {
        match s {
            FeasibleSet::MinkowskiSum { summands: inner } => summands.extend(inner),
            other => summands.push(other),
        }
    }
    if summands.len() == 1 {
        return Ok(summands.pop().expect("one summand"));
    }
    Ok(FeasibleSet::MinkowskiSum { summands })
}

pub fn support(set: &FeasibleSet, direction: &[f64]) -> Result<(f64, PayoffVector)> {
    set.support(direction)
}

pub fn contains(set: &FeasibleSet, x: &[f64], tol: f64) -> Result<bool> {
    set.contains(x, tol)
}

/// Strictly positive sampling directions: angles in the plane, a Halton-based
/// exponential map onto the simplex in higher dimensions.
pub(crate) fn positive_directions(n: usize, k: usize) -> Vec<Vec<f64>> {
    if k == 1 || n == 1 {
        return vec![vec![1.0 / n as f64; n]; k.max(1)];
    }
    if n == 2 {
        return (0..k)
            .map(|j| {
                let th = (j as f64 + 0.5) / k as f64 * std::f64::consts::FRAC_PI_2;
                vec![th.cos(), th.sin()]
            })
            .collect();
    }
    const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    let halton = |mut idx: u64, base: u64| {
        let (mut f, mut r) = (1.0, 0.0);
        while idx > 0 {
            f /= base as f64;
            r += f * (idx % base) as f64;
            idx /= base;
        }
        r
    };
    (0..k)
        .map(|j| {
            let raw: Vec<f64> = (0..n)
                .map(|i| -halton(j as u64 + 1, PRIMES[i % PRIMES.len()]).max(1e-12).ln())
                .collect();
            let s: f64 = raw.iter().sum();
            raw.iter().map(|v| v / s).collect()
        })
        .collect()
}

/// `k` support maximizers for strictly positive directions.
pub fn pareto_frontier_sample(set: &FeasibleSet, k: usize) -> Result<Vec<PayoffVector>> {
    if k == 0 {
        return Err(Error::Invalid("sample size must be at least one".into()));
    }
    Ok(positive_directions(set.dim(), k)
        .iter()
        .map(|w| PayoffVector(set.support_raw(w).1))
        .collect())
}

/// Whether no point of the set improves some coordinate of `x` by `tol`
/// while keeping every other coordinate at least at its value in `x`.
pub fn is_pareto_optimal(set: &FeasibleSet, x: &[f64], tol: f64) -> Result<bool> {
    if !set.contains(x, tol.max(MEMBERSHIP_TOL))? {
        return Err(Error::OutsideSet);
    }
    let n = set.dim();
    for i in 0..n {
        let lower: Vec<Option<f64>> = (0..n).map(|j| if j == i { None } else { Some(x[j]) }).collect();
        if let Some((m, _)) = set.max_coordinate(i, &lower)? {
            if m >= x[i] + tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Outward unit normal of a smooth planar set at a frontier point.
pub fn normal_weights_at(set: &ParametricFrontierSet, x: &[f64]) -> Result<PayoffVector> {
    check_dim(2, x.len())?;
    set.normal_at(x).map(PayoffVector)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> FeasibleSet {
        FeasibleSet::polytope(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap()
    }

    #[test]
    fn segment_support() {
        let s = FeasibleSet::polytope(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let (v, x) = s.support(&[1.0, 1.0]).unwrap();
        assert_eq!(v, 1.0);
        assert!(x.as_slice() == [0.0, 1.0] || x.as_slice() == [1.0, 0.0]);
    }

    #[test]
    fn table_two_player_one_support() {
        let s = FeasibleSet::polytope(vec![vec![0.0, -3.0], vec![-1.0, 0.0]]).unwrap();
        let (v, x) = s.support(&[1.0, 0.0]).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(x.as_slice(), [0.0, -3.0]);
    }

    #[test]
    fn disk_support_is_diagonal() {
        let d = FeasibleSet::disk([1.0, 1.0]).unwrap();
        let (v, x) = d.support(&[1.0, 1.0]).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-12);
        assert!((x[0] - 0.5f64.sqrt()).abs() < 1e-12 && (x[1] - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn zero_direction_rejected() {
        assert_eq!(square().support(&[0.0, 0.0]).unwrap_err(), Error::ZeroDirection);
        assert!(matches!(square().support(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn square_membership() {
        assert!(square().contains(&[0.5, 0.5], 1e-9).unwrap());
        assert!(!square().contains(&[1.1, 0.0], 1e-9).unwrap());
    }

    #[test]
    fn singleton_sum() {
        let s = minkowski_sum(vec![
            FeasibleSet::point(vec![1.0, 2.0]).unwrap(),
            FeasibleSet::point(vec![3.0, 4.0]).unwrap(),
        ])
        .unwrap();
        let (_, x) = s.support(&[0.3, -0.7]).unwrap();
        assert_eq!(x.as_slice(), [4.0, 6.0]);
        assert!(s.contains(&[4.0, 6.0], 1e-9).unwrap());
        assert!(!s.contains(&[4.0, 6.1], 1e-9).unwrap());
    }

    #[test]
    fn segments_sum_contains_center() {
        let h = FeasibleSet::polytope(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let s = minkowski_sum(vec![h.clone(), h]).unwrap();
        assert!(s.contains(&[1.0, 1.0], 1e-9).unwrap());
        assert!(s.contains(&[2.0, 0.0], 1e-9).unwrap());
        assert!(is_pareto_optimal(&s, &[1.0, 1.0], 1e-6).unwrap());
    }

    #[test]
    fn pareto_checks() {
        assert!(!is_pareto_optimal(&square(), &[0.5, 0.5], 1e-6).unwrap());
        assert!(is_pareto_optimal(&square(), &[1.0, 1.0], 1e-6).unwrap());
        let d = FeasibleSet::disk([1.0, 1.0]).unwrap();
        let h = 0.5f64.sqrt();
        assert!(is_pareto_optimal(&d, &[h, h], 1e-6).unwrap());
        assert!(is_pareto_optimal(&d, &[0.98, (1.0f64 - 0.98 * 0.98).sqrt()], 1e-6).unwrap());
        assert_eq!(is_pareto_optimal(&square(), &[2.0, 0.0], 1e-6).unwrap_err(), Error::OutsideSet);
    }

    #[test]
    fn square_sample_top_corner() {
        let pts = pareto_frontier_sample(&square(), 1).unwrap();
        assert_eq!(pts[0].as_slice(), [1.0, 1.0]);
    }

    #[test]
    fn disk_samples_on_circle() {
        let d = FeasibleSet::disk([1.0, 1.0]).unwrap();
        for p in pareto_frontier_sample(&d, 3).unwrap() {
            assert!((norm(&p) - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn planar_hull_of_square_with_interior() {
        let p = PolytopeSet::new(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.5, 0.5],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ])
        .unwrap();
        assert_eq!(p.planar_hull().unwrap().len(), 4);
    }

    #[test]
    fn max_coordinate_polytope_and_disk() {
        let (m, _) = square().max_coordinate(0, &[None, Some(0.5)]).unwrap().unwrap();
        assert!((m - 1.0).abs() < 1e-9);
        assert!(square().max_coordinate(0, &[None, Some(2.0)]).unwrap().is_none());
        let d = FeasibleSet::disk([1.0, 1.0]).unwrap();
        let sum = minkowski_sum(vec![d.clone(), d]).unwrap();
        let (m, _) = sum.max_coordinate(0, &[None, Some(1.0)]).unwrap().unwrap();
        // Two unit quarter disks, x2 >= 1: best is (sqrt(3)/2 * 2, 1) split evenly.
        assert!((m - 3f64.sqrt()).abs() < 1e-9, "{m}");
    }
}
