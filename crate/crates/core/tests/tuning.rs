use duo::miners::imbalanced_fixture;
use duo::model::Direction;
use duo::optimizers::DeParams;
use duo::problems::{make_problem, Domain, Problem};
use duo::tuning::{
    cross_validate, de_tune, de_tune_by, grid_search_by, Learner, Metric, Param, ParamDomain, ParamSpace, Params,
    TuningSpec,
};
use duo::Seed;
use proptest::prelude::*;

fn small_space() -> ParamSpace {
    ParamSpace::new(vec![
        Param::new("a", ParamDomain::Integer { lo: 0, hi: 4 }, 2.0),
        Param::new("b", ParamDomain::Values(vec![0.1, 0.5, 0.9]), 0.5),
    ])
    .unwrap()
}

fn bumpy(p: &Params) -> f64 {
    let (a, b) = (p["a"], p["b"]);
    ((a - 3.0) * b).abs() + (a * 1.7).sin().abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tuned_never_worse_than_default(seed in 0u64..10_000, shift in -3.0f64..3.0, maximize: bool) {
        let direction = if maximize { Direction::Maximize } else { Direction::Minimize };
        let de = DeParams { np: 6, f: 0.75, cr: 0.3, generations: 2 };
        let r = de_tune_by(&small_space(), direction, &de, Seed(seed), |p| Ok(bumpy(p) + shift * p["b"])).unwrap();
        let default = r.default_fitness.unwrap();
        prop_assert!(!direction.better(default, r.best_fitness));
    }

    #[test]
    fn grid_best_ignores_cell_order(seed in 0u64..1000) {
        let space = small_space();
        let forward = grid_search_by(&space, Direction::Minimize, |p| Ok(bumpy(p))).unwrap();
        let mut cells = space.grid().unwrap();
        let mut rng = Seed(seed).rng();
        use rand::seq::SliceRandom;
        cells.shuffle(&mut rng);
        let best = cells.iter().map(bumpy).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(forward.best_fitness, best);
        prop_assert_eq!(bumpy(&forward.best), best);
    }
}

#[test]
fn de_tune_with_no_generations_reports_default() {
    let de = DeParams { np: 1, f: 0.75, cr: 0.3, generations: 0 };
    let r = de_tune_by(&small_space(), Direction::Minimize, &de, Seed(3), |p| Ok(bumpy(p))).unwrap();
    assert_eq!(r.best, small_space().defaults());
    assert_eq!(r.evals(), 1);
}

#[test]
fn smote_tuning_lifts_recall() {
    let de = DeParams { np: 10, f: 0.75, cr: 0.3, generations: 3 };
    let spec = TuningSpec::new(Learner::SmoteCart, Metric::Recall);
    let mut gains = Vec::new();
    for s in 0..10 {
        let data = imbalanced_fixture(20, 9, Seed(100 + s));
        let r = de_tune(&spec, &data, &de, Seed(s)).unwrap();
        let cv_seed = Seed(r.cv_seed.unwrap());
        let tuned = cross_validate(Learner::SmoteCart, &r.best, &data, 3, 1, cv_seed).unwrap().fitness(Metric::Recall);
        let base = cross_validate(Learner::Cart, &Learner::Cart.defaults(), &data, 3, 1, cv_seed)
            .unwrap()
            .fitness(Metric::Recall);
        gains.push(tuned - base);
    }
    let wins = gains.iter().filter(|&&g| g >= 0.05).count();
    assert!(wins >= 8, "gains {gains:?}");
}

#[test]
fn cross_validation_is_seeded() {
    let data = imbalanced_fixture(12, 4, Seed(5));
    let p = Learner::SmoteCart.defaults();
    let a = cross_validate(Learner::SmoteCart, &p, &data, 4, 2, Seed(8)).unwrap();
    let b = cross_validate(Learner::SmoteCart, &p, &data, 4, 2, Seed(8)).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.folds.len(), 8);
    for r in 0..2 {
        let mut seen: Vec<usize> = a.folds.iter().filter(|f| f.repeat == r).flat_map(|f| f.test_indices.clone()).collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..data.len()).collect::<Vec<_>>());
    }
}

#[test]
fn problems_are_pure() {
    for desc in ["requirements(n=8,seed=3)", "product-line(features=20,seed=2)", "biobjective-curve(d=3)"] {
        let problem = make_problem(&desc.parse().unwrap()).unwrap();
        let mut rng = Seed(1).rng();
        let xs: Vec<Vec<f64>> = (0..20).map(|_| problem.random_decisions(&mut rng)).collect();
        let (mut p, mut q) = (problem.fresh(), problem.fresh());
        let first: Vec<_> = xs.iter().map(|x| p.evaluate(x).unwrap()).collect();
        let again: Vec<_> = xs.iter().rev().map(|x| q.evaluate(x).unwrap()).collect();
        assert!(first.iter().eq(again.iter().rev()));
        assert_eq!(p.evals(), 20);
    }
}

#[test]
fn violation_is_zero_exactly_when_feasible() {
    let p = Problem::builder("disc")
        .decisions(2, Domain::Real { lo: -2.0, hi: 2.0 })
        .goal("f", Direction::Minimize, |x| x[0] + x[1])
        .inequality(|x| x[0] * x[0] + x[1] * x[1] - 1.0)
        .equality(|x| x[0] - x[1])
        .build()
        .unwrap();
    assert_eq!(p.violation(&[0.5, 0.5]), 0.0);
    assert!(p.violation(&[0.5, 0.4]) > 0.0);
    assert!(p.violation(&[1.5, 1.5]) > 0.0);
}
