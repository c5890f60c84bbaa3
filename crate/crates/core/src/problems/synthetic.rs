//! Synthetic problems used to exercise the optimizers.

use super::{Domain, Problem};
use crate::error::{Error, Result};
use crate::model::Direction;
use crate::rng::Seed;
use rand::Rng;

/// Sum of squares over `d` decisions in `[-5, 5]`; minimum 0 at the origin.
pub fn sphere(d: usize) -> Result<Problem> {
    Problem::builder(format!("sphere(d={d})"))
        .decisions(d, Domain::Real { lo: -5.0, hi: 5.0 })
        .goal("f", Direction::Minimize, |x| x.iter().map(|v| v * v).sum())
        .build()
}

/// Two minimized goals on `[0, 1]^d` whose optimal front is
/// `f2 = 1 - sqrt(f1)`, reached when decisions `1..d` are zero.
pub fn biobjective_curve(d: usize) -> Result<Problem> {
    if d < 2 {
        return Err(Error::invalid("biobjective-curve needs d >= 2"));
    }
    Problem::builder(format!("biobjective-curve(d={d})"))
        .decisions(d, Domain::Real { lo: 0.0, hi: 1.0 })
        .goal("f1", Direction::Minimize, |x| x[0])
        .goal("f2", Direction::Minimize, |x| {
            let g = 1.0 + 9.0 * x[1..].iter().sum::<f64>() / (x.len() - 1) as f64;
            g * (1.0 - (x[0] / g).sqrt())
        })
        .build()
}

/// A configurable-system stand-in: `d` options with integer levels
/// `0..levels`, and a minimized "runtime" dominated by a few options plus one
/// pairwise interaction. Option importance decays geometrically.
pub fn configuration_space(d: usize, levels: i64, seed: Seed) -> Result<Problem> {
    if d < 2 || levels < 2 {
        return Err(Error::invalid("configurations need d >= 2 and levels >= 2"));
    }
    let mut rng = seed.rng();
    let targets: Vec<f64> = (0..d).map(|_| rng.gen_range(0..levels) as f64).collect();
    let weights: Vec<f64> = (0..d).map(|j| 10.0 * 0.6f64.powi(j as i32)).collect();
    let (p, q) = (0, 1);
    Problem::builder(format!("configurations(d={d},levels={levels},seed={})", seed.0))
        .decisions(d, Domain::Integer { lo: 0, hi: levels - 1 })
        .goal("runtime", Direction::Minimize, move |x| {
            let base: f64 = x
                .iter()
                .zip(&targets)
                .zip(&weights)
                .map(|((v, t), w)| w * (v - t).abs())
                .sum();
            let interaction = if x[p] > targets[p] { 2.0 * x[q] } else { 0.0 };
            100.0 + base + interaction
        })
        .build()
}
