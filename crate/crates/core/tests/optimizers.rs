use duo::dominance::{boolean_dominates, nondominated_filter};
use duo::optimizers::{
    de_optimize, flash_optimize, ga_optimize, sway_eval_bound, sway_sample, DeParams, GaParams, OptimizerConfig,
    SwayParams,
};
use duo::problems::{biobjective_curve, configuration_space, make_problem, sphere, Domain, Problem};
use duo::model::Direction;
use duo::Seed;

#[test]
fn de_sphere_converges() {
    let params = DeParams { np: 20, f: 0.75, cr: 0.3, generations: 250 };
    let hits = (0..20)
        .filter(|&s| {
            let mut p = sphere(5).unwrap();
            de_optimize(&mut p, &params, Seed(s)).unwrap().best.scores()[0] <= 1e-3
        })
        .count();
    assert!(hits >= 18, "{hits}/20");
}

#[test]
fn de_counts_and_zero_generations() {
    let mut p = sphere(3).unwrap();
    let r = de_optimize(&mut p, &DeParams { np: 20, f: 0.75, cr: 0.3, generations: 10 }, Seed(1)).unwrap();
    assert_eq!((r.evals, p.evals()), (220, 220));

    let mut p = sphere(3).unwrap();
    let r = de_optimize(&mut p, &DeParams { np: 8, f: 0.75, cr: 0.3, generations: 0 }, Seed(4)).unwrap();
    let best_initial = r.evaluated.iter().map(|c| c.scores()[0]).fold(f64::INFINITY, f64::min);
    assert_eq!(r.best.scores()[0], best_initial);
    assert!(de_optimize(&mut p, &DeParams { np: 3, f: 0.75, cr: 0.3, generations: 1 }, Seed(4)).is_err());
}

#[test]
fn ga_generation_zero_is_filtered_initial_population() {
    let mut p = biobjective_curve(4).unwrap();
    let r = ga_optimize(&mut p, &GaParams { np: 30, generations: 0, ..GaParams::default() }, Seed(2)).unwrap();
    let spec = p.spec();
    assert_eq!(r.evaluated.len(), 30);
    let mut unique = r.evaluated.clone();
    unique.dedup_by(|a, b| a.decisions == b.decisions);
    assert_eq!(r.front, nondominated_filter(&unique, &spec).unwrap());
    assert!(ga_optimize(&mut p, &GaParams { np: 31, ..GaParams::default() }, Seed(2)).is_err());
}

#[test]
fn ga_champion_never_dominated_by_earlier_candidates() {
    for desc in ["biobjective-curve(d=5)", "requirements(n=10,seed=4)", "product-line(features=25,seed=1)"] {
        let problem = make_problem(&desc.parse().unwrap()).unwrap();
        let spec = problem.spec();
        for s in 0..3 {
            let mut p = problem.fresh();
            let r = ga_optimize(&mut p, &GaParams { np: 20, generations: 15, ..GaParams::default() }, Seed(s)).unwrap();
            assert!(!r.evaluated.iter().any(|c| boolean_dominates(c.scores(), r.best.scores(), &spec)));
            for (i, later) in r.history.iter().enumerate() {
                assert!(!r.history[..i].iter().any(|e| boolean_dominates(&e.champion, &later.champion, &spec)));
            }
        }
    }
}

#[test]
fn fronts_survive_the_filter_and_runs_repeat() {
    let configs = [
        OptimizerConfig::De(DeParams { np: 10, f: 0.75, cr: 0.3, generations: 5 }),
        OptimizerConfig::Ga(GaParams { np: 10, generations: 5, ..GaParams::default() }),
        OptimizerConfig::Sway(SwayParams { n0: 256, stop: 8 }),
    ];
    let problem = make_problem(&"requirements(n=9,seed=2)".parse().unwrap()).unwrap();
    let spec = problem.spec();
    for c in &configs {
        let (mut p1, mut p2) = (problem.fresh(), problem.fresh());
        let a = c.run(&mut p1, Seed(9)).unwrap();
        let b = c.run(&mut p2, Seed(9)).unwrap();
        assert_eq!(a, b, "{}", c.name());
        assert_eq!(nondominated_filter(&a.front, &spec).unwrap(), a.front);
    }
}

#[test]
fn sway_bound_sweep() {
    for exp in 4..=14 {
        let n0 = 1usize << exp;
        for stop in [2, 4, 7, 20] {
            if stop > n0 {
                continue;
            }
            let mut p = biobjective_curve(3).unwrap();
            let r = sway_sample(&mut p, n0, stop, Seed(exp as u64)).unwrap();
            assert!(r.evals <= sway_eval_bound(n0, stop), "n0={n0} stop={stop}: {}", r.evals);
            assert_eq!(r.evals, p.evals());
        }
    }
    let mut p = biobjective_curve(3).unwrap();
    assert!(sway_sample(&mut p, 10_000, 20, Seed(0)).unwrap().evals <= 48);
}

/// Ten-option integer problem with a unique optimum at all zeros.
fn pool_problem() -> (Problem, Vec<Vec<f64>>) {
    let p = Problem::builder("bowl")
        .decisions(3, Domain::Integer { lo: 0, hi: 9 })
        .goal("y", Direction::Minimize, |x| x.iter().map(|v| v * v).sum())
        .build()
        .unwrap();
    let pool: Vec<Vec<f64>> = (0..1000).map(|i| vec![(i / 100) as f64, (i / 10 % 10) as f64, (i % 10) as f64]).collect();
    (p, pool)
}

#[test]
fn flash_exhaustive_budget_finds_optimum() {
    let (mut p, pool) = pool_problem();
    let small: Vec<Vec<f64>> = pool.iter().step_by(37).cloned().collect();
    let truth = small.iter().map(|x| x.iter().map(|v| v * v).sum::<f64>()).fold(f64::INFINITY, f64::min);
    let r = flash_optimize(&mut p, &small, 3, small.len(), Seed(1)).unwrap();
    assert_eq!(r.best.scores()[0], truth);
    assert_eq!(r.evals, small.len() as u64);
}

#[test]
fn flash_init_equals_budget_is_random_search() {
    let (mut p, pool) = pool_problem();
    let r = flash_optimize(&mut p, &pool, 15, 15, Seed(6)).unwrap();
    assert_eq!(r.evaluated.len(), 15);
    let best = r.evaluated.iter().map(|(_, c)| c.scores()[0]).fold(f64::INFINITY, f64::min);
    assert_eq!(r.best.scores()[0], best);
    assert_eq!(p.evals(), 15);
}

#[test]
fn flash_rejects_bad_settings() {
    let (mut p, pool) = pool_problem();
    assert!(flash_optimize(&mut p, &pool[..5], 6, 6, Seed(0)).is_err());
    assert!(flash_optimize(&mut p, &pool[..5], 2, 6, Seed(0)).is_err());
    let mut multi = biobjective_curve(3).unwrap();
    assert!(flash_optimize(&mut multi, &[vec![0.5; 3]], 1, 1, Seed(0)).is_err());
}

#[test]
fn flash_beats_random_on_configurations() {
    let problem = configuration_space(6, 5, Seed(2)).unwrap();
    let mut rng = Seed(3).rng();
    let pool: Vec<Vec<f64>> = (0..600).map(|_| problem.random_decisions(&mut rng)).collect();
    let (mut flash, mut random) = (0.0, 0.0);
    for s in 0..10 {
        let mut p = problem.fresh();
        flash += flash_optimize(&mut p, &pool, 10, 40, Seed(s)).unwrap().best.scores()[0];
        let mut p = problem.fresh();
        random += flash_optimize(&mut p, &pool, 40, 40, Seed(s)).unwrap().best.scores()[0];
    }
    assert!(flash < random, "flash {flash} random {random}");
}
