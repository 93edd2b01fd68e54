use serde::{Deserialize, Serialize};

use super::{FeasibleSet, PolytopeSet};
use crate::error::{Error, Result};

/// Increasing convex cost of producing utility on one axis, zero at the origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "cost", rename_all = "kebab-case")]
pub enum CostFn {
    Linear { k: f64 },
    Quadratic { k: f64 },
}

impl CostFn {
    fn value(self, x: f64) -> f64 {
        match self {
            Self::Linear { k } => k * x,
            Self::Quadratic { k } => k * x * x,
        }
    }

    fn inverse(self, y: f64) -> f64 {
        let y = y.max(0.0);
        match self {
            Self::Linear { k } => y / k,
            Self::Quadratic { k } => (y / k).sqrt(),
        }
    }

    fn derivative(self, x: f64) -> f64 {
        match self {
            Self::Linear { k } => k,
            Self::Quadratic { k } => 2.0 * k * x,
        }
    }

    fn coefficient(self) -> f64 {
        match self {
            Self::Linear { k } | Self::Quadratic { k } => k,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ParametricKind {
    /// Quarter unit disk.
    DiskQuadratic,
    /// Hull of logarithmic returns to a resource budget `r`.
    LogExponential { r: f64 },
    /// Budget set `c1(y1) + c2(y2) <= budget`.
    CustomLevel { budget: f64, costs: [CostFn; 2] },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct ParametricSpec {
    #[serde(flatten)]
    kind: ParametricKind,
    scale: [f64; 2],
}

/// Planar compact convex set `{(s1 y1, s2 y2) : y in B}` where `B` lies in the
/// nonnegative quadrant, contains the origin, and has a concave decreasing
/// upper frontier `y2 = g(y1)` on `[0, X]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParametricSpec", into = "ParametricSpec")]
pub struct ParametricFrontierSet {
    kind: ParametricKind,
    scale: [f64; 2],
    // Tangent point (T1, T2) of the log hull, with T1 >= T2; absent when the hull is a triangle.
    tangent: Option<(f64, f64)>,
}

impl TryFrom<ParametricSpec> for ParametricFrontierSet {
    type Error = Error;
    fn try_from(s: ParametricSpec) -> Result<Self> {
        validate(&s.kind)?;
        if s.scale.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Invalid("parametric set scales must be positive".into()));
        }
        Ok(Self::raw(s.kind, s.scale))
    }
}

impl From<ParametricFrontierSet> for ParametricSpec {
    fn from(p: ParametricFrontierSet) -> Self {
        Self { kind: p.kind, scale: p.scale }
    }
}

fn validate(kind: &ParametricKind) -> Result<()> {
    match *kind {
        ParametricKind::DiskQuadratic => Ok(()),
        ParametricKind::LogExponential { r } => {
            if !(r.is_finite() && r > 1.0) {
                return Err(Error::Invalid(format!("resource budget must exceed 1, got {r}")));
            }
            Ok(())
        }
        ParametricKind::CustomLevel { budget, costs } => {
            if !(budget.is_finite() && budget > 0.0) {
                return Err(Error::Invalid("budget must be positive".into()));
            }
            if costs.iter().any(|c| !(c.coefficient().is_finite() && c.coefficient() > 0.0)) {
                return Err(Error::Invalid("cost coefficients must be positive".into()));
            }
            Ok(())
        }
    }
}

fn log_tangent(r: f64) -> Option<(f64, f64)> {
    if r <= 4.0 {
        return None;
    }
    let big_l = r.ln();
    let c = |t: f64| (r - t.exp()).ln();
    let dc = |t: f64| -t.exp() / (r - t.exp());
    let q = |t: f64| c(t) + dc(t) * (big_l - t);
    let (mut lo, mut hi) = ((r / 2.0).ln(), (r - 1.0).ln());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if q(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi.abs() {
            break;
        }
    }
    let t1 = 0.5 * (lo + hi);
    Some((t1, c(t1)))
}

impl ParametricFrontierSet {
    fn raw(kind: ParametricKind, scale: [f64; 2]) -> Self {
        let tangent = match kind {
            ParametricKind::LogExponential { r } => log_tangent(r),
            _ => None,
        };
        Self { kind, scale, tangent }
    }

    /// Build the set; a zero scale collapses it onto a segment of the other axis.
    pub(crate) fn build(kind: ParametricKind, scale: [f64; 2]) -> Result<FeasibleSet> {
        validate(&kind)?;
        if scale.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Invalid("parametric set scales must be nonnegative".into()));
        }
        let base = Self::raw(kind, [1.0, 1.0]);
        Ok(match (scale[0] > 0.0, scale[1] > 0.0) {
            (true, true) => FeasibleSet::Parametric(Self::raw(kind, scale)),
            (true, false) => FeasibleSet::Polytope(PolytopeSet::new(vec![
                vec![0.0, 0.0],
                vec![scale[0] * base.x_max(), 0.0],
            ])?),
            (false, true) => FeasibleSet::Polytope(PolytopeSet::new(vec![
                vec![0.0, 0.0],
                vec![0.0, scale[1] * base.g(0.0)],
            ])?),
            (false, false) => FeasibleSet::Polytope(PolytopeSet::point(vec![0.0, 0.0])?),
        })
    }

    pub fn kind(&self) -> ParametricKind {
        self.kind
    }

    pub fn scale(&self) -> [f64; 2] {
        self.scale
    }

    pub(crate) fn scaled(&self, f: [f64; 2]) -> Result<FeasibleSet> {
        if f.iter().any(|v| *v < 0.0) {
            return Err(Error::Invalid("negative scale factor".into()));
        }
        Self::build(self.kind, [self.scale[0] * f[0], self.scale[1] * f[1]])
    }

    fn x_max(&self) -> f64 {
        match self.kind {
            ParametricKind::DiskQuadratic => 1.0,
            ParametricKind::LogExponential { r } => r.ln(),
            ParametricKind::CustomLevel { budget, costs } => costs[0].inverse(budget),
        }
    }

    /// Base frontier height.
    fn g(&self, y1: f64) -> f64 {
        let y1 = y1.clamp(0.0, self.x_max());
        match self.kind {
            ParametricKind::DiskQuadratic => (1.0 - y1 * y1).max(0.0).sqrt(),
            ParametricKind::LogExponential { r } => {
                let big_l = r.ln();
                match self.tangent {
                    None => (big_l - y1).max(0.0),
                    Some((t1, t2)) => {
                        if y1 <= t2 {
                            big_l + (t1 - big_l) * (y1 / t2)
                        } else if y1 <= t1 {
                            (r - y1.exp()).ln()
                        } else {
                            (t2 * (big_l - y1) / (big_l - t1)).max(0.0)
                        }
                    }
                }
            }
            ParametricKind::CustomLevel { budget, costs } => costs[1].inverse(budget - costs[0].value(y1)),
        }
    }

    /// Base frontier slope (left derivative at kinks, right derivative at zero).
    fn dg(&self, y1: f64) -> f64 {
        let x_max = self.x_max();
        match self.kind {
            ParametricKind::DiskQuadratic => {
                if y1 >= 1.0 {
                    f64::NEG_INFINITY
                } else {
                    -y1.max(0.0) / (1.0 - y1 * y1).sqrt()
                }
            }
            ParametricKind::LogExponential { r } => {
                let big_l = r.ln();
                match self.tangent {
                    None => -1.0,
                    Some((t1, t2)) => {
                        if y1 < t2 {
                            (t1 - big_l) / t2
                        } else if y1 <= t1 {
                            -y1.exp() / (r - y1.exp())
                        } else {
                            -t2 / (big_l - t1)
                        }
                    }
                }
            }
            ParametricKind::CustomLevel { costs, .. } => {
                let y1 = y1.clamp(0.0, x_max);
                let d2 = costs[1].derivative(self.g(y1));
                if d2 <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    -costs[0].derivative(y1) / d2
                }
            }
        }
    }

    fn inside_base(&self, y: [f64; 2]) -> bool {
        y[0] >= 0.0 && y[1] >= 0.0 && y[0] <= self.x_max() && y[1] <= self.g(y[0])
    }

    /// Maximizer over the base set for a strictly positive direction.
    fn support_base(&self, om: [f64; 2]) -> [f64; 2] {
        match self.kind {
            ParametricKind::DiskQuadratic => {
                let n = om[0].hypot(om[1]);
                [om[0] / n, om[1] / n]
            }
            ParametricKind::LogExponential { r } => {
                let big_l = r.ln();
                let rho = om[0] / om[1];
                match self.tangent {
                    None => {
                        if rho >= 1.0 {
                            [big_l, 0.0]
                        } else {
                            [0.0, big_l]
                        }
                    }
                    Some((t1, t2)) => {
                        let k = t2 / (big_l - t1);
                        if rho >= k {
                            [big_l, 0.0]
                        } else if rho <= 1.0 / k {
                            [0.0, big_l]
                        } else {
                            [(r * rho / (1.0 + rho)).ln(), (r / (1.0 + rho)).ln()]
                        }
                    }
                }
            }
            ParametricKind::CustomLevel { .. } => {
                let x_max = self.x_max();
                let slope = |y1: f64| om[0] + om[1] * self.dg(y1);
                if slope(0.0) <= 0.0 {
                    return [0.0, self.g(0.0)];
                }
                if slope(x_max) >= 0.0 {
                    return [x_max, self.g(x_max)];
                }
                let (mut lo, mut hi) = (0.0, x_max);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if slope(mid) > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo <= 4.0 * f64::EPSILON * x_max {
                        break;
                    }
                }
                let y1 = 0.5 * (lo + hi);
                [y1, self.g(y1)]
            }
        }
    }

    pub(crate) fn support(&self, w: &[f64]) -> (f64, Vec<f64>) {
        let s = self.scale;
        let om = [s[0] * w[0], s[1] * w[1]];
        let y = if om[0] <= 0.0 && om[1] <= 0.0 {
            [0.0, 0.0]
        } else if om[1] <= 0.0 {
            [self.x_max(), 0.0]
        } else if om[0] <= 0.0 {
            [0.0, self.g(0.0)]
        } else {
            self.support_base(om)
        };
        let x = vec![s[0] * y[0], s[1] * y[1]];
        (w[0] * x[0] + w[1] * x[1], x)
    }

    /// Minkowski gauge of a nonnegative base point.
    fn gauge_base(&self, y: [f64; 2]) -> f64 {
        if y[0] == 0.0 && y[1] == 0.0 {
            return 0.0;
        }
        if let ParametricKind::DiskQuadratic = self.kind {
            return y[0].hypot(y[1]);
        }
        let inside = |s: f64| self.inside_base([s * y[0], s * y[1]]);
        let mut hi = 1.0;
        while inside(hi) {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        while !inside(hi * 0.5) && hi > 1e-300 {
            hi *= 0.5;
        }
        if inside(hi * 0.5) {
            lo = hi * 0.5;
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if inside(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        1.0 / (0.5 * (lo + hi))
    }

    /// Gauge of a point of the plane with respect to the scaled set.
    pub fn gauge(&self, x: &[f64]) -> f64 {
        self.gauge_base([x[0].max(0.0) / self.scale[0], x[1].max(0.0) / self.scale[1]])
    }

    /// Level function: gauge minus one, or the negative excursion outside the quadrant.
    pub fn level(&self, x: &[f64]) -> f64 {
        let neg = (-x[0]).max(-x[1]).max(0.0);
        (self.gauge(x) - 1.0).max(neg)
    }

    /// Radial projection onto the frontier.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        let g = self.gauge(x);
        if g <= 0.0 {
            return Err(Error::Degenerate("cannot project the origin".into()));
        }
        Ok(vec![x[0].max(0.0) / g, x[1].max(0.0) / g])
    }

    pub(crate) fn normal_at(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x[0] < -1e-9 || x[1] < -1e-9 || (self.gauge(x) - 1.0).abs() > 1e-6 {
            return Err(Error::NotOnFrontier);
        }
        let y1 = x[0].max(0.0) / self.scale[0];
        let x_max = self.x_max();
        let slope = if y1 >= x_max * (1.0 - 1e-12) {
            self.dg(x_max)
        } else {
            self.dg(y1)
        };
        if slope == f64::NEG_INFINITY {
            return Ok(vec![1.0, 0.0]);
        }
        let gs = slope * self.scale[1] / self.scale[0];
        let n = (-gs).hypot(1.0);
        if !n.is_finite() || n == 0.0 {
            return Err(Error::Degenerate("zero gradient".into()));
        }
        Ok(vec![-gs / n, 1.0 / n])
    }
}
