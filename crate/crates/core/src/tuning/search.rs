use super::cv::{cross_validate, Learner};
use super::metrics::Metric;
use super::space::{ParamSpace, Params};
use crate::error::{Error, Result};
use crate::miners::Dataset;
use crate::model::Direction;
use crate::optimizers::DeParams;
use crate::rng::Seed;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// What to tune and how to score it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TuningSpec {
    pub learner: Learner,
    pub space: ParamSpace,
    pub metric: Metric,
    pub folds: usize,
    pub repeats: usize,
}

impl TuningSpec {
    /// Built-in space of `learner`, 3 folds, 1 repeat.
    pub fn new(learner: Learner, metric: Metric) -> Self {
        TuningSpec {
            learner,
            space: learner.space(),
            metric,
            folds: 3,
            repeats: 1,
        }
    }

    /// Mean cross-validated metric of `params`. Every call with the same
    /// seed sees the same folds.
    pub fn fitness(&self, params: &Params, data: &Dataset, seed: Seed) -> Result<f64> {
        Ok(cross_validate(self.learner, params, data, self.folds, self.repeats, seed)?.fitness(self.metric))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub params: Params,
    pub fitness: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TuneReport {
    pub direction: Direction,
    pub best: Params,
    pub best_fitness: f64,
    /// Fitness of the default configuration, when it was evaluated.
    pub default_fitness: Option<f64>,
    /// Every fitness evaluation, in order.
    pub trials: Vec<Trial>,
    /// Seed of the cross-validation folds shared by all trials.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cv_seed: Option<u64>,
}

impl TuneReport {
    pub fn evals(&self) -> usize {
        self.trials.len()
    }
}

/// Strictly better under `direction`; NaN is never better.
fn improves(direction: Direction, a: f64, b: f64) -> bool {
    match direction {
        Direction::Minimize => a < b,
        Direction::Maximize => a > b,
    }
}

fn not_worse(direction: Direction, a: f64, b: f64) -> bool {
    !improves(direction, b, a) && !a.is_nan()
}

/// Exhaustive search with a caller-supplied fitness. Ties keep the first
/// cell in grid order.
pub fn grid_search_by<F>(space: &ParamSpace, direction: Direction, mut fitness: F) -> Result<TuneReport>
where
    F: FnMut(&Params) -> Result<f64>,
{
    let cells = space.grid()?;
    let mut trials: Vec<Trial> = Vec::with_capacity(cells.len());
    let mut best: Option<usize> = None;
    for cell in cells {
        let f = fitness(&cell)?;
        if best.map_or(!f.is_nan(), |b| improves(direction, f, trials[b].fitness)) {
            best = Some(trials.len());
        }
        trials.push(Trial { params: cell, fitness: f });
    }
    let b = best.ok_or(Error::Empty("grid with a defined fitness"))?;
    Ok(TuneReport {
        direction,
        best: trials[b].params.clone(),
        best_fitness: trials[b].fitness,
        default_fitness: None,
        trials,
        cv_seed: None,
    })
}

/// Cross-validated grid search over `spec.space`.
pub fn grid_search(spec: &TuningSpec, data: &Dataset, seed: Seed) -> Result<TuneReport> {
    let mut r = grid_search_by(&spec.space, spec.metric.direction(), |p| spec.fitness(p, data, seed))?;
    r.cv_seed = Some(seed.0);
    Ok(r)
}

/// Differential evolution over the parameter space with a caller-supplied
/// fitness. Member 0 of the first generation is `space`'s default; the
/// returned configuration is the best ever evaluated (first on ties), so it
/// is never worse than the default.
pub fn de_tune_by<F>(space: &ParamSpace, direction: Direction, de: &DeParams, seed: Seed, mut fitness: F) -> Result<TuneReport>
where
    F: FnMut(&Params) -> Result<f64>,
{
    de.validate(if de.generations == 0 { 1 } else { 4 })?;
    let mut rng = seed.rng();
    let bounds: Vec<(f64, f64)> = space.params().iter().map(|p| p.gene_bounds()).collect();
    let defaults = space.defaults();

    let mut trials: Vec<Trial> = Vec::new();
    let mut best: Option<usize> = None;
    let mut record = |params: Params, f: f64, trials: &mut Vec<Trial>| {
        if best.map_or(!f.is_nan(), |b| improves(direction, f, trials[b].fitness)) {
            best = Some(trials.len());
        }
        trials.push(Trial { params, fitness: f });
    };

    let mut genes: Vec<Vec<f64>> = Vec::with_capacity(de.np);
    let mut fit: Vec<f64> = Vec::with_capacity(de.np);
    genes.push(space.encode(&defaults));
    let f0 = fitness(&defaults)?;
    fit.push(f0);
    record(defaults, f0, &mut trials);
    for _ in 1..de.np {
        let g: Vec<f64> = bounds
            .iter()
            .map(|&(lo, hi)| if hi > lo { rng.gen_range(lo..=hi) } else { lo })
            .collect();
        let params = space.decode(&g);
        let f = fitness(&params)?;
        genes.push(g);
        fit.push(f);
        record(params, f, &mut trials);
    }

    let m = bounds.len();
    for _ in 0..de.generations {
        for i in 0..de.np {
            let o = crate::optimizers::de::distinct_others(&mut rng, de.np, i, 3);
            let forced = rng.gen_range(0..m);
            let trial: Vec<f64> = (0..m)
                .map(|j| {
                    if j == forced || rng.gen::<f64>() < de.cr {
                        let (lo, hi) = bounds[j];
                        (genes[o[0]][j] + de.f * (genes[o[1]][j] - genes[o[2]][j])).clamp(lo, hi)
                    } else {
                        genes[i][j]
                    }
                })
                .collect();
            let params = space.decode(&trial);
            let f = fitness(&params)?;
            if not_worse(direction, f, fit[i]) {
                genes[i] = trial;
                fit[i] = f;
            }
            record(params, f, &mut trials);
        }
    }

    let b = best.ok_or(Error::Empty("population with a defined fitness"))?;
    Ok(TuneReport {
        direction,
        best: trials[b].params.clone(),
        best_fitness: trials[b].fitness,
        default_fitness: Some(f0),
        trials,
        cv_seed: None,
    })
}

/// Seed of the folds `de_tune` uses for `seed`.
pub fn tuning_cv_seed(seed: Seed) -> Seed {
    seed.salted(0x7475_6e65)
}

/// Cross-validated DE tuning of `spec.learner`. All candidates share the
/// folds of [`tuning_cv_seed`].
pub fn de_tune(spec: &TuningSpec, data: &Dataset, de: &DeParams, seed: Seed) -> Result<TuneReport> {
    let cv_seed = tuning_cv_seed(seed);
    let mut r = de_tune_by(&spec.space, spec.metric.direction(), de, seed, |p| spec.fitness(p, data, cv_seed))?;
    r.cv_seed = Some(cv_seed.0);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tuning::{Param, ParamDomain};

    fn square() -> ParamSpace {
        ParamSpace::new(vec![
            Param::new("p1", ParamDomain::Values(vec![1.0, 2.0]), 1.0),
            Param::new("p2", ParamDomain::Values(vec![10.0, 20.0]), 10.0),
        ])
        .unwrap()
    }

    #[test]
    fn grid_stub_picks_max_corner() {
        let r = grid_search_by(&square(), Direction::Maximize, |p| Ok(p["p1"] + p["p2"])).unwrap();
        assert_eq!((r.best["p1"], r.best["p2"]), (2.0, 20.0));
        assert_eq!(r.trials.len(), 4);
        let r = grid_search_by(&square(), Direction::Minimize, |p| Ok(p["p1"] + p["p2"])).unwrap();
        assert_eq!((r.best["p1"], r.best["p2"]), (1.0, 10.0));
    }

    #[test]
    fn grid_ties_keep_first() {
        let r = grid_search_by(&square(), Direction::Maximize, |_| Ok(1.0)).unwrap();
        assert_eq!((r.best["p1"], r.best["p2"]), (1.0, 10.0));
    }

    #[test]
    fn de_zero_generations_returns_default() {
        let de = DeParams { np: 1, f: 0.75, cr: 0.3, generations: 0 };
        let r = de_tune_by(&square(), Direction::Maximize, &de, Seed(3), |p| Ok(p["p1"])).unwrap();
        assert_eq!(r.best, square().defaults());
        assert_eq!(r.trials.len(), 1);
    }

    #[test]
    fn de_never_worse_than_default() {
        let space = ParamSpace::new(vec![Param::new("x", ParamDomain::Real { lo: -5.0, hi: 5.0 }, 0.0)]).unwrap();
        let de = DeParams { np: 6, f: 0.75, cr: 0.9, generations: 5 };
        for seed in 0..10 {
            let r = de_tune_by(&space, Direction::Minimize, &de, Seed(seed), |p| Ok(p["x"].powi(2))).unwrap();
            assert_eq!(r.best_fitness, 0.0);
            assert_eq!(r.trials.len(), 36);
        }
    }
}
