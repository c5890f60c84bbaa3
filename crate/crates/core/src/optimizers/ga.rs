use super::{OptimizerResult, RunLog};
use crate::dominance::{boolean_dominates, nondominated_indices, zitzler_better};
use crate::error::{Error, Result};
use crate::model::ObjectiveSpec;
use crate::problems::{Domain, Problem};
use crate::rng::Seed;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

/// Parameters of the elitist genetic algorithm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaParams {
    /// Population size; must be even.
    pub np: usize,
    pub generations: usize,
    /// Per-gene mutation probability; `None` means `1 / arity`.
    pub mutation_rate: Option<f64>,
    /// Standard deviation of numeric mutation, as a fraction of the span.
    pub mutation_scale: f64,
}

impl Default for GaParams {
    fn default() -> Self {
        GaParams {
            np: 100,
            generations: 100,
            mutation_rate: None,
            mutation_scale: 0.1,
        }
    }
}

/// Peel successive non-dominated fronts. Indices within a front ascend.
pub fn nondominated_sort<P: AsRef<[f64]>>(points: &[P], spec: &ObjectiveSpec) -> Vec<Vec<usize>> {
    let mut remaining: Vec<usize> = (0..points.len()).collect();
    let mut fronts = Vec::new();
    while !remaining.is_empty() {
        let sub: Vec<&[f64]> = remaining.iter().map(|&i| points[i].as_ref()).collect();
        let local = nondominated_indices(&sub, spec);
        let front: Vec<usize> = local.iter().map(|&k| remaining[k]).collect();
        let mut keep = local.into_iter().peekable();
        let mut rest = Vec::with_capacity(remaining.len() - front.len());
        for (k, &i) in remaining.iter().enumerate() {
            if keep.peek() == Some(&k) {
                keep.next();
            } else {
                rest.push(i);
            }
        }
        remaining = rest;
        fronts.push(front);
    }
    fronts
}

/// Crowding distance of each member of `front` (parallel to it). Boundary
/// members of every goal get infinity.
pub fn crowding_distance<P: AsRef<[f64]>>(points: &[P], front: &[usize]) -> Vec<f64> {
    let n = front.len();
    let mut dist = vec![0.0; n];
    if n == 0 {
        return dist;
    }
    let goals = points[front[0]].as_ref().len();
    for g in 0..goals {
        let val = |k: usize| points[front[k]].as_ref()[g];
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| val(a).total_cmp(&val(b)).then(a.cmp(&b)));
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        let range = val(order[n - 1]) - val(order[0]);
        if range <= 0.0 {
            continue;
        }
        for w in 1..n.saturating_sub(1) {
            dist[order[w]] += (val(order[w + 1]) - val(order[w - 1])) / range;
        }
    }
    dist
}

/// Elitist GA: binary tournaments decided by boolean dominance (indicator
/// predicate for incomparable pairs), uniform crossover, per-gene mutation,
/// and survival by non-dominated sorting with crowding distance. Uses exactly
/// `np * (generations + 1)` evaluations.
pub fn ga_optimize(problem: &mut Problem, params: &GaParams, seed: Seed) -> Result<OptimizerResult> {
    if params.np < 2 || !params.np.is_multiple_of(2) {
        return Err(Error::invalid(format!("GA needs an even np >= 2, got {}", params.np)));
    }
    let m = problem.arity();
    let rate = params.mutation_rate.unwrap_or(1.0 / m as f64);
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::invalid(format!("mutation rate {rate} outside [0, 1]")));
    }
    let mut rng = seed.rng();
    let mut log = RunLog::new(problem);
    let domains: Vec<Domain> = problem.domains().to_vec();
    let normal = Normal::new(0.0, 1.0).expect("unit normal");

    let mut genomes: Vec<Vec<f64>> = (0..params.np).map(|_| problem.random_decisions(&mut rng)).collect();
    let mut scores = Vec::with_capacity(params.np);
    for g in &genomes {
        scores.push(log.evaluate(problem, g)?.objectives.expect("evaluated"));
    }
    log.snapshot(0, problem);

    let mut spec = problem.spec();
    for gen in 1..=params.generations {
        spec.fit_bounds(scores.iter().map(Vec::as_slice));
        let tournament = |rng: &mut rand_chacha::ChaCha8Rng| {
            let a = rng.gen_range(0..params.np);
            let b = rng.gen_range(0..params.np);
            let (x, y) = (&scores[a], &scores[b]);
            if boolean_dominates(y, x, &spec) || (!boolean_dominates(x, y, &spec) && zitzler_better(y, x, &spec)) {
                b
            } else {
                a
            }
        };
        let mut children: Vec<Vec<f64>> = Vec::with_capacity(params.np);
        while children.len() < params.np {
            let (p1, p2) = (tournament(&mut rng), tournament(&mut rng));
            let mut c1 = genomes[p1].clone();
            let mut c2 = genomes[p2].clone();
            for j in 0..m {
                if rng.gen_bool(0.5) {
                    std::mem::swap(&mut c1[j], &mut c2[j]);
                }
            }
            for child in [&mut c1, &mut c2] {
                for (j, d) in domains.iter().enumerate() {
                    if rng.gen::<f64>() < rate {
                        child[j] = mutate(child[j], d, params.mutation_scale, normal.sample(&mut rng));
                    }
                }
            }
            children.push(c1);
            children.push(c2);
        }
        let mut merged_genomes = genomes;
        let mut merged_scores = scores;
        for child in children {
            let c = log.evaluate(problem, &child)?;
            merged_genomes.push(child);
            merged_scores.push(c.objectives.expect("evaluated"));
        }

        let mut survivors: Vec<usize> = Vec::with_capacity(params.np);
        for front in nondominated_sort(&merged_scores, &spec) {
            if survivors.len() + front.len() <= params.np {
                survivors.extend(front);
            } else {
                let crowd = crowding_distance(&merged_scores, &front);
                let mut order: Vec<usize> = (0..front.len()).collect();
                order.sort_by(|&a, &b| crowd[b].total_cmp(&crowd[a]).then(front[a].cmp(&front[b])));
                let need = params.np - survivors.len();
                survivors.extend(order.into_iter().take(need).map(|k| front[k]));
            }
            if survivors.len() == params.np {
                break;
            }
        }
        genomes = survivors.iter().map(|&i| merged_genomes[i].clone()).collect();
        scores = survivors.iter().map(|&i| merged_scores[i].clone()).collect();
        log.snapshot(gen, problem);
    }
    Ok(log.finish(problem))
}

fn mutate(v: f64, d: &Domain, scale: f64, z: f64) -> f64 {
    match *d {
        Domain::Bool => 1.0 - v,
        Domain::Fixed(x) => x,
        Domain::Real { lo, hi } => (v + z * scale * (hi - lo)).clamp(lo, hi),
        Domain::Integer { lo, hi } => {
            let step = (scale * (hi - lo) as f64).max(1.0);
            let mut nv = (v + z * step).round();
            if nv == v {
                nv += if z >= 0.0 { 1.0 } else { -1.0 };
            }
            nv.clamp(lo as f64, hi as f64)
        }
    }
}
