//! SWAY: sample a large population, then recursively split it around two
//! distant poles, evaluating only the poles and keeping the half nearer the
//! better one.

use super::{OptimizerResult, RunLog};
use crate::dominance::zitzler_better;
use crate::error::{Error, Result};
use crate::problems::{Domain, Problem};
use crate::rng::Seed;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwayParams {
    /// Size of the initial (unevaluated) population.
    pub n0: usize,
    /// Groups at or below this size stop splitting; survivors are evaluated.
    pub stop: usize,
}

/// Upper bound on SWAY's evaluations: two poles per level plus the final
/// group, `2 * ceil(log2(n0 / stop)) + stop`.
pub fn sway_eval_bound(n0: usize, stop: usize) -> u64 {
    let mut levels = 0u64;
    let mut size = n0;
    while size > stop {
        size -= size / 2;
        levels += 1;
    }
    2 * levels + stop as u64
}

pub fn sway_sample(problem: &mut Problem, n0: usize, stop: usize, seed: Seed) -> Result<OptimizerResult> {
    if stop < 2 {
        return Err(Error::invalid("SWAY stop size must be >= 2"));
    }
    if n0 < stop {
        return Err(Error::invalid(format!("SWAY needs n0 >= stop, got n0 = {n0}, stop = {stop}")));
    }
    let mut rng = seed.rng();
    let mut log = RunLog::new(problem);
    let pop: Vec<Vec<f64>> = (0..n0).map(|_| problem.random_decisions(&mut rng)).collect();
    let scale = Scale::new(problem.domains());
    let mut scores: Vec<Option<Vec<f64>>> = vec![None; n0];
    let mut spec = problem.spec();

    let mut group: Vec<usize> = (0..n0).collect();
    let mut level = 0;
    while group.len() > stop {
        let r = group[rng.gen_range(0..group.len())];
        let a = farthest(&pop, &group, r, &scale);
        let b = farthest(&pop, &group, a, &scale);
        for pole in [a, b] {
            if scores[pole].is_none() {
                let c = log.evaluate(problem, &pop[pole])?;
                scores[pole] = c.objectives;
            }
        }
        let (sa, sb) = (scores[a].as_deref().unwrap(), scores[b].as_deref().unwrap());
        spec.fit_bounds(scores.iter().flatten().map(Vec::as_slice));
        let keep_b = zitzler_better(sb, sa, &spec);

        // FastMap projection onto the pole axis.
        let c = scale.dist(&pop[a], &pop[b]);
        let mut projected: Vec<(f64, usize)> = group
            .iter()
            .map(|&i| {
                let x = if c > 0.0 {
                    let (da, db) = (scale.dist(&pop[i], &pop[a]), scale.dist(&pop[i], &pop[b]));
                    (da * da + c * c - db * db) / (2.0 * c)
                } else {
                    0.0
                };
                (x, i)
            })
            .collect();
        projected.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)));
        let keep = group.len() - group.len() / 2;
        group = if keep_b {
            projected[projected.len() - keep..].iter().map(|p| p.1).collect()
        } else {
            projected[..keep].iter().map(|p| p.1).collect()
        };
        level += 1;
        log.snapshot(level, problem);
    }
    for &i in &group {
        if scores[i].is_none() {
            let c = log.evaluate(problem, &pop[i])?;
            scores[i] = c.objectives;
        }
    }
    log.snapshot(level + 1, problem);
    Ok(log.finish(problem))
}

fn farthest(pop: &[Vec<f64>], group: &[usize], from: usize, scale: &Scale) -> usize {
    let mut best = (from, -1.0);
    for &i in group {
        let d = scale.dist(&pop[i], &pop[from]);
        if d > best.1 {
            best = (i, d);
        }
    }
    best.0
}

/// Euclidean distance over min-max scaled decisions; booleans differ by
/// 0 or 1 and pinned decisions contribute nothing.
struct Scale {
    width: Vec<f64>,
}

impl Scale {
    fn new(domains: &[Domain]) -> Self {
        Scale {
            width: domains
                .iter()
                .map(|d| {
                    let (lo, hi) = d.span();
                    if hi > lo {
                        hi - lo
                    } else {
                        0.0
                    }
                })
                .collect(),
        }
    }

    fn dist(&self, x: &[f64], y: &[f64]) -> f64 {
        x.iter()
            .zip(y)
            .zip(&self.width)
            .filter(|(_, w)| **w > 0.0)
            .map(|((a, b), w)| ((a - b) / w).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{biobjective_curve, make_problem};

    #[test]
    fn bound_examples() {
        assert_eq!(sway_eval_bound(16, 4), 8);
        assert_eq!(sway_eval_bound(10_000, 20), 38);
        assert_eq!(sway_eval_bound(8, 8), 8);
    }

    #[test]
    fn small_run_within_bound() {
        let mut p = biobjective_curve(4).unwrap();
        let r = sway_sample(&mut p, 16, 4, Seed(1)).unwrap();
        assert!(r.evals <= 8, "{}", r.evals);
        assert_eq!(r.evals, p.evals());
    }

    #[test]
    fn no_recursion_when_n0_equals_stop() {
        let mut p = biobjective_curve(4).unwrap();
        let r = sway_sample(&mut p, 6, 6, Seed(1)).unwrap();
        assert_eq!(r.evals, 6);
    }

    #[test]
    fn large_population_is_cheap() {
        let mut p = make_problem(&"product-line(features=30,seed=1)".parse().unwrap()).unwrap();
        let r = sway_sample(&mut p, 10_000, 20, Seed(7)).unwrap();
        assert!(r.evals <= 48);
        assert!((r.evals as f64) < 0.01 * 10_000.0);
    }

    #[test]
    fn invalid_sizes() {
        let mut p = biobjective_curve(2).unwrap();
        assert!(sway_sample(&mut p, 3, 4, Seed(0)).is_err());
        assert!(sway_sample(&mut p, 3, 1, Seed(0)).is_err());
    }
}
