//! Random game generators and property checks shared by the property and acceptance suites.

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ecl_bargain::bayesian::{EclBayesianGame, EclBayesianBargainingGame, JointStrategyDistribution, TypePrior, UtilityView};
use ecl_bargain::error::Error;
use ecl_bargain::games::{FiniteGame, NormalFormSeparableGame};
use ecl_bargain::geometry::{is_pareto_optimal, minkowski_sum, FeasibleSet};
use ecl_bargain::solutions::{nbs, SolutionReport, SolutionWeights};
use ecl_bargain::stability::{
    balanced_combination, core_membership, find_core_point, Coalition, CoalitionFunction, WorstCaseMethod,
    WorstCasePayoffMatrix, BLOCKING_TOL,
};

pub type Check = std::result::Result<(), String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn close(what: &str, a: &[f64], b: &[f64], tol: f64) -> Check {
    let d = dev(a, b);
    if d <= tol {
        Ok(())
    } else {
        Err(format!("{what}: {a:?} vs {b:?} differ by {d:.3e}"))
    }
}

fn lift<T>(r: ecl_bargain::error::Result<T>, what: &str) -> std::result::Result<T, String> {
    r.map_err(|e| format!("{what}: {e}"))
}

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0.0..1.0)).collect()
}

fn random_simplex(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / s).collect()
}

/// A full-dimensional polytope in `[0,1]^n` with its generator centroid.
pub fn random_polytope(rng: &mut ChaCha8Rng, n: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let k = n + rng.gen_range(2..=5);
    let gens: Vec<Vec<f64>> = (0..k).map(|_| random_point(rng, n)).collect();
    let centroid = (0..n).map(|j| gens.iter().map(|g| g[j]).sum::<f64>() / k as f64).collect();
    (gens, centroid)
}

/// Uniform NBS; `None` when the disagreement point admits no strict improvement.
fn solve(gens: Vec<Vec<f64>>, d: &[f64]) -> std::result::Result<Option<SolutionReport>, String> {
    let f = lift(FeasibleSet::polytope(gens), "polytope")?;
    match nbs(&f, d, &SolutionWeights::uniform(d.len())) {
        Ok(r) => Ok(Some(r)),
        Err(Error::NoStrictImprovement) => Ok(None),
        Err(e) => Err(format!("nbs: {e}")),
    }
}

/// Affine invariance, IIA, anonymity, Pareto optimality and individual
/// rationality of the NBS on one random polytope game.
pub fn nbs_axioms(seed: u64, tol: f64) -> Check {
    let mut rng = rng(seed);
    let n = rng.gen_range(2..=4);
    let (gens, d) = random_polytope(&mut rng, n);
    let Some(base) = solve(gens.clone(), &d)? else { return Ok(()) };
    let x = base.point.to_vec();
    let f = lift(FeasibleSet::polytope(gens.clone()), "polytope")?;

    if !lift(is_pareto_optimal(&f, &x, tol), "pareto")? {
        return Err(format!("solution {x:?} is not Pareto optimal"));
    }
    if let Some(j) = (0..n).find(|&j| x[j] < d[j] - tol) {
        return Err(format!("player {j} gets {} below disagreement {}", x[j], d[j]));
    }

    let scale: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
    let shift: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let phi = |v: &[f64]| -> Vec<f64> { v.iter().zip(&scale).zip(&shift).map(|((v, a), b)| a * v + b).collect() };
    let mapped = solve(gens.iter().map(|g| phi(g)).collect(), &phi(&d))?.ok_or("affine image lost its gains")?;
    close("affine invariance", mapped.point.as_slice(), &phi(&x), tol)?;

    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let permute = |v: &[f64]| -> Vec<f64> { perm.iter().map(|&k| v[k]).collect() };
    let permuted = solve(gens.iter().map(|g| permute(g)).collect(), &permute(&d))?.ok_or("permutation lost its gains")?;
    close("anonymity", permuted.point.as_slice(), &permute(&x), tol)?;

    let mut sub = vec![x.clone(), d.clone()];
    sub.extend(gens.iter().filter(|_| rng.gen_bool(0.5)).cloned());
    let restricted = solve(sub, &d)?.ok_or("subset lost its gains")?;
    close("independence of irrelevant alternatives", restricted.point.as_slice(), &x, tol)
}

fn argmax_sum(sets: &[FeasibleSet], w: &[&[f64]]) -> std::result::Result<Vec<f64>, String> {
    let mut x = vec![0.0; sets[0].dim()];
    for (s, w) in sets.iter().zip(w) {
        let (_, p) = lift(s.support(w), "support")?;
        for (a, b) in x.iter_mut().zip(p.iter()) {
            *a += b;
        }
    }
    Ok(x)
}

/// Every player maximizing the same positive weights lands on the joint frontier.
pub fn equal_weights_pareto(seed: u64) -> Check {
    let mut rng = rng(seed);
    let n = rng.gen_range(2..=4);
    let sets: Vec<FeasibleSet> = (0..n)
        .map(|_| lift(FeasibleSet::polytope(random_polytope(&mut rng, n).0), "polytope"))
        .collect::<Result<_, _>>()?;
    let mu: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let x = argmax_sum(&sets, &vec![mu.as_slice(); n])?;
    let joint = lift(minkowski_sum(sets), "sum")?;
    if lift(is_pareto_optimal(&joint, &x, 1e-6), "pareto")? {
        Ok(())
    } else {
        Err(format!("common weights {mu:?} give a dominated sum {x:?}"))
    }
}

/// Two disks maximizing different weights leave gains on the table.
pub fn unequal_weights_dominated(seed: u64) -> Check {
    let mut rng = rng(seed);
    let disk = |rng: &mut ChaCha8Rng| FeasibleSet::disk([rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0)]);
    let sets = vec![lift(disk(&mut rng), "disk")?, lift(disk(&mut rng), "disk")?];
    let a = rng.gen_range(0.1..0.45);
    let b = rng.gen_range(0.55..0.9);
    let (w1, w2) = ([a, 1.0 - a], [b, 1.0 - b]);
    let x = argmax_sum(&sets, &[&w1, &w2])?;
    let joint = lift(minkowski_sum(sets), "sum")?;
    if lift(is_pareto_optimal(&joint, &x, 1e-6), "pareto")? {
        Err(format!("weights {w1:?} and {w2:?} give a Pareto optimal sum {x:?}"))
    } else {
        Ok(())
    }
}

/// Random prior table over type vectors that is invariant under player permutations.
fn exchangeable_table(rng: &mut ChaCha8Rng, players: usize, types: usize) -> Vec<f64> {
    let mut mass: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    let keys: Vec<Vec<usize>> = (0..types.pow(players as u32))
        .map(|idx| {
            let mut digits: Vec<usize> = (0..players).map(|k| idx / types.pow((players - 1 - k) as u32) % types).collect();
            digits.sort_unstable();
            digits
        })
        .collect();
    let raw: Vec<f64> = keys.iter().map(|k| *mass.entry(k.clone()).or_insert_with(|| rng.gen_range(0.1..1.0))).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / s).collect()
}

/// Conditional and mixed-profile expected utilities agree for independent play,
/// over every small shape of game.
pub fn uncorrelated_equivalence(seed: u64) -> Check {
    let mut rng = rng(seed);
    for players in 2..=3usize {
        for types in 1..=2usize {
            for actions in 1..=3usize {
                let payoffs: Vec<Vec<Vec<f64>>> = (0..types)
                    .map(|_| (0..types).map(|_| (0..actions).map(|_| rng.gen_range(-5.0..5.0)).collect()).collect())
                    .collect();
                let table = exchangeable_table(&mut rng, players, types);
                let joint = lift(TypePrior::full_joint(players, types, table), "prior")?;
                let sigma: Vec<Vec<f64>> = (0..types)
                    .map(|_| {
                        let mut v: Vec<f64> = (0..actions).map(|_| if rng.gen_bool(0.25) { 0.0 } else { rng.gen_range(0.1..1.0) }).collect();
                        if v.iter().all(|p| *p == 0.0) {
                            v[0] = 1.0;
                        }
                        let s: f64 = v.iter().sum();
                        v.into_iter().map(|p| p / s).collect()
                    })
                    .collect();
                for (prior, strategy) in [
                    (joint.clone(), Some(players)),
                    (joint.clone(), None),
                    (joint.to_pairwise(), None),
                ] {
                    let g = lift(EclBayesianGame::new(payoffs.clone(), prior), "game")?;
                    let s = lift(JointStrategyDistribution::uncorrelated(strategy, &sigma), "strategy")?;
                    for t in 0..types {
                        for a in (0..actions).filter(|&a| sigma[t][a] > 0.0) {
                            let c = lift(g.conditional_expected_utility(&s, a, t), "conditional")?;
                            let m = lift(g.action_expected_utility(&sigma, a, t), "mixed")?;
                            if (c - m).abs() > 1e-12 {
                                return Err(format!(
                                    "n = {players}, types = {types}, action {a} of type {t}: {c} vs {m}"
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn random_separable_game(rng: &mut ChaCha8Rng, max_players: usize, max_actions: usize) -> NormalFormSeparableGame {
    let n = rng.gen_range(2..=max_players);
    let actions = (0..n)
        .map(|_| {
            let k = rng.gen_range(1..=max_actions);
            (0..k).map(|_| (0..n).map(|_| (rng.gen_range(0.0..10.0f64) * 4.0).round() / 4.0).collect()).collect()
        })
        .collect();
    NormalFormSeparableGame::new(actions).expect("well-formed random game")
}

/// The worst-case coalition function always has a core point.
pub fn worst_case_core_nonempty(seed: u64) -> Check {
    let g = random_separable_game(&mut rng(seed), 4, 4);
    let nu = lift(CoalitionFunction::worst_case(g.clone(), WorstCaseMethod::Exact), "coalition function")?;
    match lift(find_core_point(&nu), "core search")? {
        Some(_) => Ok(()),
        None => Err(format!("no core point found for {:?}", Vec::<Vec<Vec<f64>>>::from(g))),
    }
}

/// Points in the worst-case core also lie in the alpha core.
pub fn core_nesting(seed: u64) -> Check {
    let mut rng = rng(seed);
    let g = random_separable_game(&mut rng, 4, 3);
    let n = g.players();
    let a_kind = lift(CoalitionFunction::worst_case(g.clone(), WorstCaseMethod::Exact), "coalition function")?;
    let alpha = lift(CoalitionFunction::alpha(g.clone()), "coalition function")?;
    let mut samples: Vec<Vec<f64>> = lift(find_core_point(&a_kind), "core search")?.into_iter().map(|p| p.into_inner()).collect();
    let f = g.feasible_set();
    for x in lift(ecl_bargain::geometry::pareto_frontier_sample(&f, 40), "frontier")? {
        samples.push(x.into_inner());
    }
    for _ in 0..20 {
        let x: Vec<f64> = (0..n)
            .map(|i| {
                let acts = g.actions(i);
                let w = random_simplex(&mut rng, acts.len());
                (0..n).map(|j| acts.iter().zip(&w).map(|(u, w)| w * u[j]).sum::<f64>()).collect::<Vec<f64>>()
            })
            .fold(vec![0.0; n], |acc, c| acc.iter().zip(&c).map(|(a, b)| a + b).collect());
        samples.push(x);
    }
    for x in samples {
        if lift(core_membership(&a_kind, &x, BLOCKING_TOL), "core")?.in_core {
            let v = lift(core_membership(&alpha, &x, 10.0 * BLOCKING_TOL), "core")?;
            if !v.in_core {
                return Err(format!("{x:?} is in the worst-case core but blocked in the alpha core by {:?}", v.blocking));
            }
        }
    }
    Ok(())
}

fn random_partition(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<usize>> {
    let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
    (0..n).map(|l| (0..n).filter(|&i| labels[i] == l).collect::<Vec<_>>()).filter(|b| !b.is_empty()).collect()
}

/// Balanced combinations of coalition strategies cover every member's claim.
pub fn balanced_inequality(seed: u64) -> Check {
    let mut rng = rng(seed);
    let g = random_separable_game(&mut rng, 4, 4);
    let n = g.players();
    let a = lift(WorstCasePayoffMatrix::worst_case(&g, WorstCaseMethod::Exact), "matrix")?;

    let parts = rng.gen_range(1..=3);
    let lambda = random_simplex(&mut rng, parts);
    let mut collection: Vec<Coalition> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    for l in &lambda {
        for block in random_partition(&mut rng, n) {
            let c = lift(Coalition::new(block), "coalition")?;
            match collection.iter().position(|s| *s == c) {
                Some(k) => weights[k] += l,
                None => {
                    collection.push(c);
                    weights.push(*l);
                }
            }
        }
    }

    // Each member plays a vertex that is Pareto optimal for the coalition.
    let mut payoffs = Vec::new();
    let mut claims = vec![f64::INFINITY; n];
    for c in &collection {
        let w: Vec<f64> = (0..n).map(|j| if c.contains(j) { rng.gen_range(0.05..1.0) } else { 0.0 }).collect();
        let mut xs = Vec::new();
        for &i in c.members() {
            let (_, p) = lift(g.individual_set(i).support(&w), "support")?;
            xs.push(p);
        }
        for &j in c.members() {
            let inside: f64 = xs.iter().map(|x| x[j]).sum();
            let outside: f64 = (0..n).filter(|i| !c.contains(*i)).map(|i| a.entry(i, j)).sum();
            claims[j] = claims[j].min(inside + outside);
        }
        payoffs.push(xs);
    }

    let hat = lift(balanced_combination(&collection, &weights, &payoffs, &a), "combination")?;
    for i in 0..n {
        if !lift(g.individual_set(i).contains(hat[i].as_slice(), 1e-9), "contains")? {
            return Err(format!("combined contribution of player {i} leaves its set"));
        }
    }
    for j in 0..n {
        let got: f64 = hat.iter().map(|x| x[j]).sum();
        if got < claims[j] - 1e-9 {
            return Err(format!("player {j} receives {got} below its claim {}", claims[j]));
        }
    }
    Ok(())
}

/// Splitting a type with the prior-weighted NBS leaves every payoff unchanged.
pub fn split_invariance(seed: u64, tol: f64) -> Check {
    let mut rng = rng(seed);
    let first = rng.gen_range(0.2..0.8);
    let nu = rng.gen_range(0.2..0.8);
    let scale = [rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0)];
    let disk = lift(FeasibleSet::disk(scale), "disk")?;
    let prior = lift(TypePrior::independent(1000, vec![first, 1.0 - first]), "prior")?;
    let g = lift(EclBayesianBargainingGame::new(vec![disk.clone(), disk], prior, UtilityView::PerOther, None), "game")?;
    split_case(&g, rng.gen_range(0..2), nu, tol)
}

/// The symmetric two-type disk game with type 1 split in half.
pub fn symmetric_split(tol: f64) -> Check {
    let g = lift(ecl_bargain::catalog::disk_game(vec![0.5, 0.5]), "game")?;
    split_case(&g, 0, 0.5, tol)
}

fn split_case(g: &EclBayesianBargainingGame, t: usize, nu: f64, tol: f64) -> Check {
    let prior_nbs = |g: &EclBayesianBargainingGame| -> std::result::Result<Vec<f64>, String> {
        let w = lift(SolutionWeights::new(g.prior().marginals()), "weights")?;
        Ok(lift(nbs(&g.feasible_set(), g.disagreement(), &w), "nbs")?.point.into_inner())
    };
    let before = prior_nbs(g)?;
    let s = lift(g.split_type(t, nu), "split")?;
    let after = prior_nbs(&s)?;
    let mut expected = before.clone();
    expected.push(before[t]);
    close("split invariance", &after, &expected, tol)
}
