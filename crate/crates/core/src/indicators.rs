//! Quality indicators for approximated Pareto fronts.
//!
//! Distance-based indicators (GD, IGD, spread, additive epsilon) first turn
//! every goal into a minimized one and rescale it to `[0, 1]` using either
//! the bounds observed over the fronts involved or caller-supplied bounds.
//! Hypervolume works in (minimization-oriented) goal units against the
//! caller's reference point.

use crate::error::{Error, Result};
use crate::model::{Direction, ObjectiveSpec};
use crate::rng::Seed;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Objective vectors sharing one set of goal directions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Front {
    pub points: Vec<Vec<f64>>,
    pub directions: Vec<Direction>,
}

impl Front {
    pub fn new(points: Vec<Vec<f64>>, directions: Vec<Direction>) -> Result<Self> {
        for p in &points {
            if p.len() != directions.len() {
                return Err(Error::GoalMismatch {
                    expected: directions.len(),
                    found: p.len(),
                });
            }
        }
        Ok(Front { points, directions })
    }

    pub fn minimize(points: Vec<Vec<f64>>) -> Result<Self> {
        let d = points.first().map_or(0, Vec::len);
        Front::new(points, vec![Direction::Minimize; d])
    }

    pub fn spec(&self) -> ObjectiveSpec {
        ObjectiveSpec::new(self.directions.clone())
    }

    pub fn goal_count(&self) -> usize {
        self.directions.len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn oriented(&self) -> Vec<Vec<f64>> {
        self.points
            .iter()
            .map(|p| p.iter().zip(&self.directions).map(|(&v, d)| d.to_min(v)).collect())
            .collect()
    }
}

/// Per-goal rescaling applied before distances are measured, expressed in
/// minimization orientation.
#[derive(Clone, Debug, PartialEq)]
pub struct Normalizer {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Normalizer {
    /// Bounds observed over all points of `fronts`.
    pub fn observed(fronts: &[&Front]) -> Self {
        let d = fronts.first().map_or(0, |f| f.goal_count());
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for f in fronts {
            for p in f.oriented() {
                for g in 0..d {
                    lo[g] = lo[g].min(p[g]);
                    hi[g] = hi[g].max(p[g]);
                }
            }
        }
        Normalizer { lo, hi }
    }

    /// Bounds given in goal units for goals with `directions`.
    pub fn fixed(lo: &[f64], hi: &[f64], directions: &[Direction]) -> Self {
        let (mut l, mut h) = (Vec::new(), Vec::new());
        for g in 0..directions.len() {
            let (a, b) = (directions[g].to_min(lo[g]), directions[g].to_min(hi[g]));
            l.push(a.min(b));
            h.push(a.max(b));
        }
        Normalizer { lo: l, hi: h }
    }

    /// `front` rescaled to these bounds, every goal minimized.
    pub fn normalized(&self, front: &Front) -> Front {
        Front {
            points: self.apply(front),
            directions: vec![Direction::Minimize; front.goal_count()],
        }
    }

    fn apply(&self, front: &Front) -> Vec<Vec<f64>> {
        front
            .oriented()
            .into_iter()
            .map(|p| self.apply_point(&p))
            .collect()
    }

    fn apply_point(&self, oriented: &[f64]) -> Vec<f64> {
        oriented
            .iter()
            .enumerate()
            .map(|(g, &v)| {
                let w = self.hi[g] - self.lo[g];
                if w > 0.0 && w.is_finite() {
                    (v - self.lo[g]) / w
                } else {
                    v - self.lo[g]
                }
            })
            .collect()
    }
}

fn check_pair(predicted: &Front, actual: &Front) -> Result<()> {
    if predicted.directions != actual.directions {
        return Err(Error::GoalMismatch {
            expected: actual.goal_count(),
            found: predicted.goal_count(),
        });
    }
    if predicted.is_empty() {
        return Err(Error::Empty("predicted front"));
    }
    if actual.is_empty() {
        return Err(Error::Empty("actual front"));
    }
    Ok(())
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn mean_nearest(from: &[Vec<f64>], to: &[Vec<f64>]) -> f64 {
    from.iter()
        .map(|p| to.iter().map(|q| euclid(p, q)).fold(f64::INFINITY, f64::min))
        .sum::<f64>()
        / from.len() as f64
}

/// Generational distance: mean distance from each predicted point to its
/// nearest actual point.
pub fn gd(predicted: &Front, actual: &Front) -> Result<f64> {
    check_pair(predicted, actual)?;
    gd_with(predicted, actual, &Normalizer::observed(&[predicted, actual]))
}

pub fn gd_with(predicted: &Front, actual: &Front, norm: &Normalizer) -> Result<f64> {
    check_pair(predicted, actual)?;
    Ok(mean_nearest(&norm.apply(predicted), &norm.apply(actual)))
}

/// Inverted generational distance: mean distance from each actual point to
/// its nearest predicted point.
pub fn igd(predicted: &Front, actual: &Front) -> Result<f64> {
    check_pair(predicted, actual)?;
    igd_with(predicted, actual, &Normalizer::observed(&[predicted, actual]))
}

pub fn igd_with(predicted: &Front, actual: &Front, norm: &Normalizer) -> Result<f64> {
    check_pair(predicted, actual)?;
    Ok(mean_nearest(&norm.apply(actual), &norm.apply(predicted)))
}

/// Additive epsilon: the smallest shift that lets the predicted front cover
/// every actual point, `max_a min_p max_g (p_g - a_g)`. Negative when the
/// predicted front is strictly better.
pub fn additive_approx(predicted: &Front, actual: &Front) -> Result<f64> {
    check_pair(predicted, actual)?;
    additive_approx_with(predicted, actual, &Normalizer::observed(&[predicted, actual]))
}

pub fn additive_approx_with(predicted: &Front, actual: &Front, norm: &Normalizer) -> Result<f64> {
    check_pair(predicted, actual)?;
    let (p, a) = (norm.apply(predicted), norm.apply(actual));
    Ok(a.iter()
        .map(|ap| {
            p.iter()
                .map(|pp| pp.iter().zip(ap).map(|(x, y)| x - y).fold(f64::NEG_INFINITY, f64::max))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Spread (diversity). Two goals: Deb's delta over consecutive gaps of the
/// front sorted by the first goal, with optional extreme points for the end
/// gaps. More goals: standard deviation of nearest-neighbour distances over
/// their mean.
pub fn spread(front: &Front, extremes: Option<(&[f64], &[f64])>) -> Result<f64> {
    if front.len() < 2 {
        return Err(Error::invalid("spread needs at least two points"));
    }
    let mut scope = vec![front.clone()];
    if let Some((first, last)) = extremes {
        for e in [first, last] {
            if e.len() != front.goal_count() {
                return Err(Error::GoalMismatch {
                    expected: front.goal_count(),
                    found: e.len(),
                });
            }
        }
        scope.push(Front::new(vec![first.to_vec(), last.to_vec()], front.directions.clone())?);
    }
    let refs: Vec<&Front> = scope.iter().collect();
    let norm = Normalizer::observed(&refs);
    let mut pts = norm.apply(front);

    if front.goal_count() != 2 {
        let d: Vec<f64> = (0..pts.len())
            .map(|i| {
                (0..pts.len())
                    .filter(|&j| j != i)
                    .map(|j| euclid(&pts[i], &pts[j]))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        if mean == 0.0 {
            return Ok(0.0);
        }
        let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / d.len() as f64;
        return Ok(var.sqrt() / mean);
    }

    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let gaps: Vec<f64> = pts.windows(2).map(|w| euclid(&w[0], &w[1])).collect();
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let (df, dl) = match extremes {
        Some((first, last)) => {
            let orient = |e: &[f64]| -> Vec<f64> {
                norm.apply_point(&e.iter().zip(&front.directions).map(|(&v, d)| d.to_min(v)).collect::<Vec<_>>())
            };
            (euclid(&orient(first), &pts[0]), euclid(&orient(last), &pts[pts.len() - 1]))
        }
        None => (0.0, 0.0),
    };
    let num = df + dl + gaps.iter().map(|g| (g - mean).abs()).sum::<f64>();
    let den = df + dl + gaps.len() as f64 * mean;
    Ok(if den == 0.0 { 0.0 } else { num / den })
}

/// Monte Carlo hypervolume estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HvEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Default Monte Carlo sample count for fronts with three or more goals.
pub const HV_SAMPLES: usize = 100_000;

/// Volume dominated by the front and bounded by `reference`. Exact for one
/// or two goals; a seeded Monte Carlo estimate ([`HV_SAMPLES`] samples)
/// otherwise. Points that do not strictly dominate the reference contribute
/// nothing.
pub fn hypervolume(front: &Front, reference: &[f64]) -> Result<f64> {
    if reference.len() != front.goal_count() {
        return Err(Error::GoalMismatch {
            expected: front.goal_count(),
            found: reference.len(),
        });
    }
    let (pts, r) = contributing(front, reference);
    match reference.len() {
        0 => Ok(0.0),
        1 => Ok(pts.iter().map(|p| r[0] - p[0]).fold(0.0, f64::max)),
        2 => Ok(hv2(pts, &r)),
        _ => Ok(hypervolume_mc(front, reference, HV_SAMPLES, Seed(0))?.value),
    }
}

/// Monte Carlo hypervolume for any goal count, with its standard error.
pub fn hypervolume_mc(front: &Front, reference: &[f64], samples: usize, seed: Seed) -> Result<HvEstimate> {
    if reference.len() != front.goal_count() {
        return Err(Error::GoalMismatch {
            expected: front.goal_count(),
            found: reference.len(),
        });
    }
    if samples == 0 {
        return Err(Error::invalid("Monte Carlo hypervolume needs samples > 0"));
    }
    let (pts, r) = contributing(front, reference);
    if pts.is_empty() {
        return Ok(HvEstimate { value: 0.0, std_error: 0.0 });
    }
    let d = r.len();
    let lower: Vec<f64> = (0..d)
        .map(|g| pts.iter().map(|p| p[g]).fold(f64::INFINITY, f64::min))
        .collect();
    let volume: f64 = (0..d).map(|g| r[g] - lower[g]).product();
    let mut rng = seed.rng();
    let mut hits = 0usize;
    let mut s = vec![0.0; d];
    for _ in 0..samples {
        for g in 0..d {
            s[g] = rng.gen_range(lower[g]..r[g]);
        }
        if pts.iter().any(|p| p.iter().zip(&s).all(|(a, b)| a <= b)) {
            hits += 1;
        }
    }
    let frac = hits as f64 / samples as f64;
    Ok(HvEstimate {
        value: volume * frac,
        std_error: volume * (frac * (1.0 - frac) / samples as f64).sqrt(),
    })
}

/// Oriented points strictly inside the reference box, and the oriented
/// reference.
fn contributing(front: &Front, reference: &[f64]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let r: Vec<f64> = reference
        .iter()
        .zip(&front.directions)
        .map(|(&v, d)| d.to_min(v))
        .collect();
    let pts = front
        .oriented()
        .into_iter()
        .filter(|p| p.iter().zip(&r).all(|(a, b)| a < b))
        .collect();
    (pts, r)
}

fn hv2(mut pts: Vec<Vec<f64>>, r: &[f64]) -> f64 {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut area = 0.0;
    let mut ceiling = r[1];
    for p in pts {
        if p[1] < ceiling {
            area += (r[0] - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    area
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(points: &[[f64; 2]]) -> Front {
        Front::minimize(points.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    #[test]
    fn gd_igd_fixture() {
        let p = f(&[[0.0, 1.0]]);
        let a = f(&[[0.0, 0.0], [1.0, 0.0]]);
        assert!((gd(&p, &a).unwrap() - 1.0).abs() < 1e-9);
        assert!((igd(&p, &a).unwrap() - (1.0 + 2f64.sqrt()) / 2.0).abs() < 1e-9);
        assert_eq!(gd(&a, &a).unwrap(), 0.0);
        assert_eq!(igd(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn subset_has_zero_gd() {
        let a = f(&[[0.0, 3.0], [1.0, 2.0], [2.0, 0.5]]);
        let p = f(&[[1.0, 2.0]]);
        assert_eq!(gd(&p, &a).unwrap(), 0.0);
    }

    #[test]
    fn epsilon_fixture() {
        assert!((additive_approx(&f(&[[1.0, 1.0]]), &f(&[[0.0, 0.0]])).unwrap() - 1.0).abs() < 1e-9);
        assert!((additive_approx(&f(&[[0.0, 0.0]]), &f(&[[1.0, 1.0]])).unwrap() + 1.0).abs() < 1e-9);
    }

    #[test]
    fn hv_fixtures() {
        let empty = Front::new(vec![], vec![Direction::Minimize; 2]).unwrap();
        assert_eq!(hypervolume(&empty, &[1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(hypervolume(&f(&[[0.0, 0.0]]), &[1.0, 1.0]).unwrap(), 1.0);
        assert!((hypervolume(&f(&[[1.0, 2.0], [2.0, 1.0]]), &[3.0, 3.0]).unwrap() - 3.0).abs() < 1e-9);
        // Outside the reference box contributes nothing.
        assert_eq!(hypervolume(&f(&[[4.0, 0.0]]), &[3.0, 3.0]).unwrap(), 0.0);
        assert!(hypervolume(&f(&[[0.0, 0.0]]), &[1.0]).is_err());
    }

    #[test]
    fn hv_respects_maximization() {
        let front = Front::new(vec![vec![2.0, 1.0]], vec![Direction::Maximize, Direction::Minimize]).unwrap();
        assert!((hypervolume(&front, &[0.0, 3.0]).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn spread_fixtures() {
        assert!(spread(&f(&[[0.0, 2.0], [1.0, 1.0], [2.0, 0.0]]), None).unwrap().abs() < 1e-12);
        assert!(spread(&f(&[[0.0, 1.0], [1.0, 0.0]]), None).unwrap().abs() < 1e-12);
        let s = spread(&f(&[[0.0, 2.0], [0.1, 1.9], [1.0, 1.0]]), None).unwrap();
        let (g1, g2) = (0.02f64.sqrt(), 1.62f64.sqrt());
        let m = (g1 + g2) / 2.0;
        assert!((s - ((g1 - m).abs() + (g2 - m).abs()) / (2.0 * m)).abs() < 1e-12);
        assert!((s - 0.80).abs() < 0.005);
        assert!(spread(&f(&[[0.0, 1.0]]), None).is_err());
    }

    #[test]
    fn spread_with_extremes_counts_end_gaps() {
        let front = f(&[[0.25, 0.75], [0.5, 0.5], [0.75, 0.25]]);
        let s = spread(&front, Some((&[0.0, 1.0], &[1.0, 0.0]))).unwrap();
        // All four gaps equal once extremes are included, but the end gaps
        // enter the numerator in full.
        let g = 0.5f64.sqrt() / 2.0;
        assert!((s - 2.0 * g / (2.0 * g + 2.0 * g)).abs() < 1e-12);
    }

    #[test]
    fn mismatched_goals() {
        let a = f(&[[0.0, 0.0]]);
        let b = Front::minimize(vec![vec![0.0, 0.0, 0.0]]).unwrap();
        assert!(matches!(gd(&a, &b), Err(Error::GoalMismatch { .. })));
        assert!(Front::new(vec![vec![1.0]], vec![Direction::Minimize; 2]).is_err());
    }
}
