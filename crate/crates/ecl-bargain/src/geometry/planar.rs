//! Frontier walks for planar sets.
//!
//! `p(th)` is the support maximizer for the direction `(cos th, sin th)`. As `th`
//! runs over `(0, pi/2)` it traces the upper-right frontier from the
//! largest-`x1` end to the largest-`x2` end, with `x1` nonincreasing and `x2`
//! nondecreasing. A kink shows up as a range of angles with a fixed maximizer,
//! a flat face as a jump between its two endpoints.

use std::f64::consts::{FRAC_PI_2, TAU};

use super::{dot, lerp, FeasibleSet};
use crate::error::Result;

const EDGE: f64 = 1e-12;
const ANGLE_ITERS: usize = 100;
const DISTANCE_GRID: usize = 720;

pub(crate) fn frontier_point(set: &FeasibleSet, th: f64) -> Vec<f64> {
    set.support_raw(&[th.cos(), th.sin()]).1
}

pub(crate) enum Crossing {
    /// The criterion already holds at the largest-`x1` end.
    Before(Vec<f64>),
    /// The criterion fails even at the largest-`x2` end.
    After(Vec<f64>),
    /// Frontier points bracketing the crossing (equal away from flat faces).
    Between(Vec<f64>, Vec<f64>),
}

/// Locate where `crit(th, p(th))` turns from negative to nonnegative, assuming
/// it is nondecreasing along the walk.
pub(crate) fn walk(set: &FeasibleSet, crit: impl Fn(f64, &[f64]) -> f64) -> Crossing {
    let (mut lo, mut hi) = (EDGE, FRAC_PI_2 - EDGE);
    let mut p_lo = frontier_point(set, lo);
    if crit(lo, &p_lo) >= 0.0 {
        return Crossing::Before(p_lo);
    }
    let mut p_hi = frontier_point(set, hi);
    if crit(hi, &p_hi) < 0.0 {
        return Crossing::After(p_hi);
    }
    for _ in 0..ANGLE_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let p = frontier_point(set, mid);
        if crit(mid, &p) < 0.0 {
            lo = mid;
            p_lo = p;
        } else {
            hi = mid;
            p_hi = p;
        }
    }
    Crossing::Between(p_lo, p_hi)
}

/// Zero of a function that is nondecreasing along the segment `a -> b`.
fn segment_root(a: &[f64], b: &[f64], f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    let (mut lo, mut hi) = (0.0, 1.0);
    if f(b) <= 0.0 {
        return b.to_vec();
    }
    if f(a) >= 0.0 {
        return a.to_vec();
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if f(&lerp(a, b, mid)) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lerp(a, b, 0.5 * (lo + hi))
}

fn fuzzy_ge(a: f64, b: f64) -> bool {
    a >= b - 1e-12 * (1.0 + b.abs())
}

/// Maximize coordinate `i` subject to the other coordinate being at least `bound`.
pub(crate) fn max_coordinate(set: &FeasibleSet, i: usize, bound: Option<f64>) -> Option<Vec<f64>> {
    let Some(l) = bound else {
        return Some(frontier_point(set, if i == 0 { EDGE } else { FRAC_PI_2 - EDGE }));
    };
    if i == 0 {
        let f = |p: &[f64]| p[1] - l;
        match walk(set, |_, p| f(p)) {
            Crossing::Before(p) => Some(p),
            Crossing::After(p) => fuzzy_ge(p[1], l).then_some(p),
            Crossing::Between(a, b) => Some(segment_root(&a, &b, f)),
        }
    } else {
        let f = |p: &[f64]| l - p[0];
        match walk(set, |_, p| f(p)) {
            Crossing::Before(p) => fuzzy_ge(p[0], l).then_some(p),
            Crossing::After(p) => Some(p),
            Crossing::Between(a, b) => Some(segment_root(&a, &b, f)),
        }
    }
}

/// Maximizer of `min(x1 - d1, x2 - d2)`.
pub(crate) fn max_min_gain(set: &FeasibleSet, d: &[f64]) -> Vec<f64> {
    let f = |p: &[f64]| (p[1] - d[1]) - (p[0] - d[0]);
    match walk(set, |_, p| f(p)) {
        Crossing::Before(p) | Crossing::After(p) => p,
        Crossing::Between(a, b) => segment_root(&a, &b, f),
    }
}

/// Largest `<u, x> - h(u)` over unit directions: the Euclidean distance for
/// outside points and minus the distance to the boundary for inside points.
pub(crate) fn support_distance(set: &FeasibleSet, x: &[f64]) -> Result<f64> {
    let val = |th: f64| {
        let u = [th.cos(), th.sin()];
        dot(&u, x) - set.support_value(&u)
    };
    let step = TAU / DISTANCE_GRID as f64;
    let (mut best_th, mut best) = (0.0, f64::NEG_INFINITY);
    for k in 0..DISTANCE_GRID {
        let th = k as f64 * step;
        let v = val(th);
        if v > best {
            best = v;
            best_th = th;
        }
    }
    // Golden-section refinement on the neighbouring cells.
    let (mut a, mut b) = (best_th - step, best_th + step);
    let gr = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - gr * (b - a);
    let mut d = a + gr * (b - a);
    let (mut fc, mut fd) = (val(c), val(d));
    for _ in 0..60 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = val(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = val(d);
        }
    }
    Ok(best.max(fc).max(fd))
}

/// Weighted log objective restricted to the segment `a -> b`; returns its maximizer.
fn segment_log_max(a: &[f64], b: &[f64], d: &[f64], w: [f64; 2]) -> Vec<f64> {
    let delta = [b[0] - a[0], b[1] - a[1]];
    let (mut t_lo, mut t_hi) = (0.0f64, 1.0f64);
    for i in 0..2 {
        let g0 = a[i] - d[i];
        if delta[i] > 0.0 {
            t_lo = t_lo.max(-g0 / delta[i]);
        } else if delta[i] < 0.0 {
            t_hi = t_hi.min(-g0 / delta[i]);
        }
    }
    if !(t_lo < t_hi) {
        return lerp(a, b, t_lo.clamp(0.0, 1.0));
    }
    let deriv = |t: f64| {
        (0..2)
            .map(|i| w[i] * delta[i] / (a[i] - d[i] + t * delta[i]))
            .sum::<f64>()
    };
    let (mut lo, mut hi) = (t_lo, t_hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let dv = deriv(mid);
        if dv > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let t = if t_lo > 0.0 || t_hi < 1.0 { t.clamp(t_lo, t_hi) } else { t };
    lerp(a, b, t)
}

/// Maximizer of `w1 log(x1 - d1) + w2 log(x2 - d2)` for strictly positive weights.
pub(crate) fn nbs(set: &FeasibleSet, d: &[f64], w: [f64; 2]) -> Vec<f64> {
    let crit = |th: f64, p: &[f64]| {
        let g0 = p[0] - d[0];
        let g1 = p[1] - d[1];
        let psi = if g0 <= 0.0 {
            0.0
        } else if g1 <= 0.0 {
            FRAC_PI_2
        } else {
            (w[1] / g1).atan2(w[0] / g0)
        };
        th - psi
    };
    match walk(set, crit) {
        Crossing::Before(p) | Crossing::After(p) => p,
        Crossing::Between(a, b) => {
            let best = segment_log_max(&a, &b, d, w);
            let obj = |p: &[f64]| {
                if p[0] > d[0] && p[1] > d[1] {
                    w[0] * (p[0] - d[0]).ln() + w[1] * (p[1] - d[1]).ln()
                } else {
                    f64::NEG_INFINITY
                }
            };
            [best, a, b]
                .into_iter()
                .max_by(|p, q| obj(p).partial_cmp(&obj(q)).expect("comparable objective"))
                .expect("candidates")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::minkowski_sum;

    #[test]
    fn distance_to_square() {
        let s = FeasibleSet::polytope(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let disk = FeasibleSet::disk([1.0, 1.0]).unwrap();
        let sum = minkowski_sum(vec![s, disk]).unwrap();
        assert!((support_distance(&sum, &[3.0, 1.0]).unwrap() - 1.0).abs() < 1e-9);
        assert!(support_distance(&sum, &[1.0, 1.0]).unwrap() < 0.0);
    }

    #[test]
    fn nbs_on_disk_pair() {
        let d = FeasibleSet::disk([0.5, 0.5]).unwrap();
        let sum = minkowski_sum(vec![d.clone(), d]).unwrap();
        let x = nbs(&sum, &[0.5, 0.5], [0.5, 0.5]);
        let h = 0.5f64.sqrt();
        assert!((x[0] - h).abs() < 1e-12 && (x[1] - h).abs() < 1e-12, "{x:?}");
    }

    #[test]
    fn nbs_on_a_flat_face() {
        let s = FeasibleSet::polytope(vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let x = nbs(&s, &[0.0, 0.0], [0.5, 0.5]);
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12, "{x:?}");
        let x = nbs(&s, &[0.0, 0.0], [0.75, 0.25]);
        assert!((x[0] - 1.5).abs() < 1e-12 && (x[1] - 0.5).abs() < 1e-12, "{x:?}");
    }
}
