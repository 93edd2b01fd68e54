use microlp::{ComparisonOp, OptimizationDirection, Problem, Solution, Variable};

use super::{dot, PolytopeSet};
use crate::error::{Error, Result};

/// Linear program over `x = sum_k sum_g lambda_{k,g} g`, one simplex of weights
/// per polytope summand.
pub(crate) struct PolySumLp<'a> {
    pub problem: Problem,
    lambdas: Vec<Vec<Variable>>,
    parts: Vec<&'a PolytopeSet>,
    dim: usize,
}

impl<'a> PolySumLp<'a> {
    /// `objective` gives the linear objective on `x` (zero when absent).
    pub fn new(parts: &[&'a PolytopeSet], direction: OptimizationDirection, objective: Option<&[f64]>) -> Self {
        let dim = parts[0].dim();
        let mut problem = Problem::new(direction);
        let mut lambdas = Vec::with_capacity(parts.len());
        for p in parts {
            let vars: Vec<Variable> = p
                .generators()
                .iter()
                .map(|g| problem.add_var(objective.map_or(0.0, |w| dot(w, g)), (0.0, f64::INFINITY)))
                .collect();
            let ones: Vec<(Variable, f64)> = vars.iter().map(|v| (*v, 1.0)).collect();
            problem.add_constraint(ones.as_slice(), ComparisonOp::Eq, 1.0);
            lambdas.push(vars);
        }
        Self { problem, lambdas, parts: parts.to_vec(), dim }
    }

    /// Terms of `x_i` as a linear expression in the weights.
    pub fn coord(&self, i: usize) -> Vec<(Variable, f64)> {
        let mut out = Vec::new();
        for (p, vars) in self.parts.iter().zip(&self.lambdas) {
            for (g, v) in p.generators().iter().zip(vars) {
                if g[i] != 0.0 {
                    out.push((*v, g[i]));
                }
            }
        }
        out
    }

    /// Terms of coordinate `i` of summand `k` alone.
    pub fn part_coord(&self, k: usize, i: usize) -> Vec<(Variable, f64)> {
        self.parts[k]
            .generators()
            .iter()
            .zip(&self.lambdas[k])
            .filter(|(g, _)| g[i] != 0.0)
            .map(|(g, v)| (*v, g[i]))
            .collect()
    }

    pub fn point(&self, sol: &Solution) -> Vec<f64> {
        let mut x = vec![0.0; self.dim];
        for (p, vars) in self.parts.iter().zip(&self.lambdas) {
            for (g, v) in p.generators().iter().zip(vars) {
                let l = sol.var_value(*v);
                if l != 0.0 {
                    for (a, b) in x.iter_mut().zip(g) {
                        *a += l * b;
                    }
                }
            }
        }
        x
    }

    /// Per-summand points `sum_g lambda_{k,g} g`.
    pub fn summand_points(&self, sol: &Solution) -> Vec<Vec<f64>> {
        self.parts
            .iter()
            .zip(&self.lambdas)
            .map(|(p, vars)| {
                let mut x = vec![0.0; self.dim];
                for (g, v) in p.generators().iter().zip(vars) {
                    let l = sol.var_value(*v);
                    for (a, b) in x.iter_mut().zip(g) {
                        *a += l * b;
                    }
                }
                x
            })
            .collect()
    }

    /// Solve; `Ok(None)` when infeasible.
    pub fn solve(&self) -> Result<Option<Solution>> {
        match self.problem.solve() {
            Ok(outcome) => match outcome.into_solution() {
                Ok(sol) => Ok(Some(sol)),
                Err(e) => Err(Error::Lp(format!("interrupted: {e:?}"))),
            },
            Err(microlp::Error::Infeasible) => Ok(None),
            Err(e) => Err(Error::Lp(e.to_string())),
        }
    }
}

pub(crate) fn distance_inf(parts: &[&PolytopeSet], x: &[f64]) -> Result<f64> {
    let mut lp = PolySumLp::new(parts, OptimizationDirection::Minimize, None);
    let t = lp.problem.add_var(1.0, (0.0, f64::INFINITY));
    for (i, xi) in x.iter().enumerate() {
        let mut e = lp.coord(i);
        e.push((t, -1.0));
        lp.problem.add_constraint(e.as_slice(), ComparisonOp::Le, *xi);
        let mut e = lp.coord(i);
        e.push((t, 1.0));
        lp.problem.add_constraint(e.as_slice(), ComparisonOp::Ge, *xi);
    }
    let sol = lp.solve()?.ok_or_else(|| Error::Lp("distance program infeasible".into()))?;
    Ok(sol.var_value(t))
}

pub(crate) fn max_linear(parts: &[&PolytopeSet], w: &[f64], lower: &[Option<f64>]) -> Result<Option<(f64, Vec<f64>)>> {
    let mut lp = PolySumLp::new(parts, OptimizationDirection::Maximize, Some(w));
    for (j, l) in lower.iter().enumerate() {
        if let Some(l) = l {
            let e = lp.coord(j);
            if e.is_empty() {
                if *l > 0.0 {
                    return Ok(None);
                }
                continue;
            }
            lp.problem.add_constraint(e.as_slice(), ComparisonOp::Ge, *l);
        }
    }
    Ok(lp.solve()?.map(|sol| {
        let x = lp.point(&sol);
        (dot(w, &x), x)
    }))
}

/// Maximize `t` subject to `x_i - d_i >= t` on `coords` and `x_j >= d_j` on `floor`.
pub(crate) fn max_min_gain(
    parts: &[&PolytopeSet],
    d: &[f64],
    coords: &[usize],
    floor: &[usize],
) -> Result<(f64, Vec<f64>)> {
    let mut lp = PolySumLp::new(parts, OptimizationDirection::Maximize, None);
    let t = lp.problem.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
    for &i in coords {
        let mut e = lp.coord(i);
        e.push((t, -1.0));
        lp.problem.add_constraint(e.as_slice(), ComparisonOp::Ge, d[i]);
    }
    for &j in floor {
        let e = lp.coord(j);
        lp.problem.add_constraint(e.as_slice(), ComparisonOp::Ge, d[j]);
    }
    let sol = lp.solve()?.ok_or(Error::NoStrictImprovement)?;
    Ok((sol.var_value(t), lp.point(&sol)))
}

pub(crate) fn ray_exit(parts: &[&PolytopeSet], o: &[f64], v: &[f64], s_max: f64) -> Result<f64> {
    let mut lp = PolySumLp::new(parts, OptimizationDirection::Maximize, None);
    let s = lp.problem.add_var(1.0, (0.0, s_max));
    for i in 0..o.len() {
        let mut e = lp.coord(i);
        e.push((s, -v[i]));
        lp.problem.add_constraint(e.as_slice(), ComparisonOp::Eq, o[i]);
    }
    let sol = lp.solve()?.ok_or(Error::OutsideSet)?;
    Ok(sol.var_value(s))
}
