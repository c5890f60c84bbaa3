//! FLASH: sequential model-based search over a finite pool of candidate
//! configurations with a regression-tree surrogate.

use crate::error::{Error, Result};
use crate::miners::{CartParams, Tree};
use crate::model::Candidate;
use crate::problems::Problem;
use crate::rng::Seed;
use rand::seq::index::sample;

#[derive(Clone, Debug, PartialEq)]
pub struct FlashResult {
    pub best: Candidate,
    /// Pool index of `best`.
    pub best_index: usize,
    /// Pool indices in evaluation order, with their evaluated candidates.
    pub evaluated: Vec<(usize, Candidate)>,
    pub evals: u64,
}

/// Surrogate settings: fully grown tree, two rows per leaf.
pub const FLASH_TREE: CartParams = CartParams {
    max_depth: None,
    min_leaf: 2,
};

/// `size` random decision vectors of `problem`, drawn from a stream that
/// does not overlap the `derive` children of `seed`.
pub fn sample_pool(problem: &Problem, size: usize, seed: Seed) -> Vec<Vec<f64>> {
    let mut rng = seed.salted(0x706f_6f6c).rng();
    (0..size).map(|_| problem.random_decisions(&mut rng)).collect()
}

/// Evaluate `init` random pool members, then repeatedly fit a CART surrogate
/// on everything evaluated and evaluate the unevaluated member with the best
/// predicted score (lowest pool index on ties) until `budget` evaluations
/// are spent. Returns the best evaluated member.
pub fn flash_optimize(
    problem: &mut Problem,
    pool: &[Vec<f64>],
    init: usize,
    budget: usize,
    seed: Seed,
) -> Result<FlashResult> {
    if problem.goal_count() != 1 {
        return Err(Error::invalid(format!(
            "FLASH supports single-goal problems; `{}` has {} goals",
            problem.name(),
            problem.goal_count()
        )));
    }
    if init == 0 {
        return Err(Error::invalid("FLASH needs init >= 1"));
    }
    if init > pool.len() {
        return Err(Error::invalid(format!("init {init} exceeds pool size {}", pool.len())));
    }
    if budget < init || budget > pool.len() {
        return Err(Error::invalid(format!(
            "budget {budget} must lie in [init, pool size] = [{init}, {}]",
            pool.len()
        )));
    }
    let direction = problem.directions()[0];
    let start = problem.evals();
    let mut rng = seed.rng();
    let mut done = vec![false; pool.len()];
    let mut evaluated: Vec<(usize, Candidate)> = Vec::with_capacity(budget);

    for i in sample(&mut rng, pool.len(), init).into_vec() {
        done[i] = true;
        evaluated.push((i, problem.evaluate(&pool[i])?));
    }
    while evaluated.len() < budget {
        let x: Vec<Vec<f64>> = evaluated.iter().map(|(i, _)| pool[*i].clone()).collect();
        let y: Vec<f64> = evaluated.iter().map(|(_, c)| c.scores()[0]).collect();
        let tree = Tree::fit_matrix(&x, &y, FLASH_TREE)?;
        let mut pick: Option<(usize, f64)> = None;
        for (i, row) in pool.iter().enumerate() {
            if done[i] {
                continue;
            }
            let v = tree.predict_value(row)?;
            if pick.is_none_or(|(_, best)| direction.better(v, best)) {
                pick = Some((i, v));
            }
        }
        let (i, _) = pick.expect("budget <= pool size leaves an unevaluated member");
        done[i] = true;
        evaluated.push((i, problem.evaluate(&pool[i])?));
    }

    let mut best = 0;
    for (k, (_, c)) in evaluated.iter().enumerate() {
        if direction.better(c.scores()[0], evaluated[best].1.scores()[0]) {
            best = k;
        }
    }
    Ok(FlashResult {
        best: evaluated[best].1.clone(),
        best_index: evaluated[best].0,
        evals: problem.evals() - start,
        evaluated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{biobjective_curve, configuration_space};

    fn pool(p: &Problem, n: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = Seed(seed).rng();
        (0..n).map(|_| p.random_decisions(&mut rng)).collect()
    }

    #[test]
    fn exhaustive_budget_finds_pool_optimum() {
        let mut p = configuration_space(5, 4, Seed(1)).unwrap();
        let pool = pool(&p, 60, 2);
        let truth = pool
            .iter()
            .map(|x| p.fresh().evaluate(x).unwrap().scores()[0])
            .fold(f64::INFINITY, f64::min);
        let r = flash_optimize(&mut p, &pool, 5, 60, Seed(3)).unwrap();
        assert_eq!(r.best.scores()[0], truth);
        assert_eq!(r.evals, 60);
    }

    #[test]
    fn init_equal_budget_is_random_search() {
        let mut p = configuration_space(5, 4, Seed(1)).unwrap();
        let pool = pool(&p, 100, 2);
        let r = flash_optimize(&mut p, &pool, 12, 12, Seed(4)).unwrap();
        let expected: Vec<usize> = sample(&mut Seed(4).rng(), 100, 12).into_vec();
        let got: Vec<usize> = r.evaluated.iter().map(|(i, _)| *i).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut multi = biobjective_curve(3).unwrap();
        let pl = pool(&multi, 10, 0);
        assert!(flash_optimize(&mut multi, &pl, 2, 5, Seed(0)).is_err());
        let mut p = configuration_space(4, 3, Seed(0)).unwrap();
        let pl = pool(&p, 10, 0);
        assert!(flash_optimize(&mut p, &pl, 11, 11, Seed(0)).is_err());
        assert!(flash_optimize(&mut p, &pl, 5, 4, Seed(0)).is_err());
        assert_eq!(p.evals(), 0);
    }
}
