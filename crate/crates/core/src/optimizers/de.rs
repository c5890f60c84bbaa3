use super::{OptimizerResult, RunLog};
use crate::dominance::zitzler_better;
use crate::error::{Error, Result};
use crate::problems::Problem;
use crate::rng::Seed;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Parameters of rand/1/bin differential evolution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeParams {
    pub np: usize,
    /// Differential weight, in `(0, 2]`.
    pub f: f64,
    /// Crossover rate, in `[0, 1]`.
    pub cr: f64,
    pub generations: usize,
}

impl DeParams {
    /// `np = 20, f = 0.75, cr = 0.3` and `10 * arity` generations.
    pub fn defaults(arity: usize) -> Self {
        DeParams {
            np: 20,
            f: 0.75,
            cr: 0.3,
            generations: 10 * arity,
        }
    }

    pub(crate) fn validate(&self, min_np: usize) -> Result<()> {
        if self.np < min_np {
            return Err(Error::invalid(format!("DE needs np >= {min_np}, got {}", self.np)));
        }
        if !(self.f > 0.0 && self.f <= 2.0) {
            return Err(Error::invalid(format!("DE weight f = {} outside (0, 2]", self.f)));
        }
        if !(0.0..=1.0).contains(&self.cr) {
            return Err(Error::invalid(format!("DE crossover cr = {} outside [0, 1]", self.cr)));
        }
        Ok(())
    }
}

/// Pick `count` distinct indices in `0..n`, all different from `exclude`.
pub(crate) fn distinct_others<R: Rng>(rng: &mut R, n: usize, exclude: usize, count: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let j = rng.gen_range(0..n);
        if j != exclude && !out.contains(&j) {
            out.push(j);
        }
    }
    out
}

/// Differential evolution (rand/1/bin). A trial replaces its target when it
/// is better under the indicator predicate, with bounds taken from the
/// current population and widened by each trial. Uses exactly
/// `np * (generations + 1)` evaluations.
pub fn de_optimize(problem: &mut Problem, params: &DeParams, seed: Seed) -> Result<OptimizerResult> {
    params.validate(4)?;
    let mut rng = seed.rng();
    let mut log = RunLog::new(problem);
    let spans: Vec<(f64, f64)> = problem.domains().iter().map(|d| d.span()).collect();
    let m = problem.arity();

    // Genomes live in the continuous relaxation; decisions are decoded.
    let mut genomes: Vec<Vec<f64>> = (0..params.np).map(|_| problem.random_decisions(&mut rng)).collect();
    let mut scores: Vec<Vec<f64>> = Vec::with_capacity(params.np);
    for g in &genomes {
        let decisions = problem.decode(g);
        let c = log.evaluate(problem, &decisions)?;
        scores.push(c.objectives.expect("evaluated"));
    }
    log.snapshot(0, problem);

    let mut spec = problem.spec();
    for gen in 1..=params.generations {
        spec.fit_bounds(scores.iter().map(Vec::as_slice));
        let mut next_genomes = genomes.clone();
        let mut next_scores = scores.clone();
        for i in 0..params.np {
            let abc = distinct_others(&mut rng, params.np, i, 3);
            let (a, b, c) = (&genomes[abc[0]], &genomes[abc[1]], &genomes[abc[2]]);
            let forced = rng.gen_range(0..m);
            let trial: Vec<f64> = (0..m)
                .map(|j| {
                    if j == forced || rng.gen::<f64>() < params.cr {
                        let (lo, hi) = spans[j];
                        (a[j] + params.f * (b[j] - c[j])).clamp(lo, hi)
                    } else {
                        genomes[i][j]
                    }
                })
                .collect();
            let decisions = problem.decode(&trial);
            let cand = log.evaluate(problem, &decisions)?;
            let ts = cand.objectives.expect("evaluated");
            spec.include(&ts);
            if zitzler_better(&ts, &scores[i], &spec) {
                next_genomes[i] = trial;
                next_scores[i] = ts;
            }
        }
        genomes = next_genomes;
        scores = next_scores;
        log.snapshot(gen, problem);
    }
    Ok(log.finish(problem))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::sphere;

    #[test]
    fn eval_count_contract() {
        let mut p = sphere(3).unwrap();
        let r = de_optimize(&mut p, &DeParams { generations: 10, ..DeParams::defaults(3) }, Seed(1)).unwrap();
        assert_eq!(r.evals, 220);
        assert_eq!(p.evals(), 220);
        assert_eq!(r.evaluated.len(), 220);
        assert_eq!(r.history.len(), 11);
    }

    #[test]
    fn zero_generations_is_best_initial() {
        let mut p = sphere(3).unwrap();
        let r = de_optimize(&mut p, &DeParams { generations: 0, ..DeParams::defaults(3) }, Seed(5)).unwrap();
        let min = r.evaluated.iter().map(|c| c.scores()[0]).fold(f64::INFINITY, f64::min);
        assert_eq!(r.best.scores()[0], min);
        assert_eq!(r.evals, 20);
    }

    #[test]
    fn rejects_small_population() {
        let mut p = sphere(2).unwrap();
        assert!(de_optimize(&mut p, &DeParams { np: 3, ..DeParams::defaults(2) }, Seed(0)).is_err());
        assert_eq!(p.evals(), 0);
    }

    #[test]
    fn deterministic() {
        let params = DeParams { generations: 5, ..DeParams::defaults(4) };
        let a = de_optimize(&mut sphere(4).unwrap(), &params, Seed(9)).unwrap();
        let b = de_optimize(&mut sphere(4).unwrap(), &params, Seed(9)).unwrap();
        assert_eq!(a, b);
    }
}
