//! Direction-sampling fallbacks for smooth sets in more than two dimensions.

use super::{dot, norm, positive_directions, FeasibleSet, PolytopeSet};

const SPHERE_SAMPLES_PER_DIM: usize = 1500;
const HULL_SAMPLES_PER_DIM: usize = 96;

fn halton(mut idx: u64, base: u64) -> f64 {
    let (mut f, mut r) = (1.0, 0.0);
    while idx > 0 {
        f /= base as f64;
        r += f * (idx % base) as f64;
        idx /= base;
    }
    r
}

fn sphere_directions(n: usize) -> Vec<Vec<f64>> {
    const PRIMES: [u64; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];
    let mut out = Vec::new();
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[i] = s;
            out.push(e);
        }
    }
    for j in 1..=(SPHERE_SAMPLES_PER_DIM * n) as u64 {
        let v: Vec<f64> = (0..n).map(|i| 2.0 * halton(j, PRIMES[i % PRIMES.len()]) - 1.0).collect();
        let l = norm(&v);
        if l > 1e-9 {
            out.push(v.iter().map(|a| a / l).collect());
        }
    }
    out
}

/// Largest `<u, x> - h(u)` over unit directions, by sampling and local ascent.
pub(crate) fn support_distance(set: &FeasibleSet, x: &[f64]) -> f64 {
    let n = x.len();
    let val = |u: &[f64]| dot(u, x) - set.support_value(u);
    let (mut best_u, mut best) = (vec![0.0; n], f64::NEG_INFINITY);
    for u in sphere_directions(n) {
        let v = val(&u);
        if v > best {
            best = v;
            best_u = u;
        }
    }
    let mut step = 0.1;
    while step > 1e-9 {
        let mut improved = false;
        for i in 0..n {
            for s in [step, -step] {
                let mut u = best_u.clone();
                u[i] += s;
                let l = norm(&u);
                let u: Vec<f64> = u.iter().map(|a| a / l).collect();
                let v = val(&u);
                if v > best {
                    best = v;
                    best_u = u;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

/// Polytope spanned by support points of strictly positive and axis directions;
/// an inner approximation of the set.
pub(crate) fn inner_hull(set: &FeasibleSet) -> PolytopeSet {
    let n = set.dim();
    let mut dirs = positive_directions(n, HULL_SAMPLES_PER_DIM * n);
    for i in 0..n {
        let mut e = vec![1e-6; n];
        e[i] = 1.0;
        dirs.push(e);
    }
    let points = dirs.iter().map(|w| set.support_raw(w).1).collect();
    PolytopeSet::new(points).expect("nonempty sample")
}
