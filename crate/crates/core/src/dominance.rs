//! Boolean Pareto dominance and the continuous indicator-based predicate.

use crate::error::{Error, Result};
use crate::model::{Candidate, ObjectiveSpec};
use std::cmp::Ordering;

/// Denominator guard of the normalization step.
pub const NORMALIZE_EPSILON: f64 = 0.00001;

/// `(z - lo) / (hi - lo + 0.00001)`.
pub fn normalize(z: f64, lo: f64, hi: f64) -> f64 {
    (z - lo) / (hi - lo + NORMALIZE_EPSILON)
}

/// True iff `x` is no worse than `y` on every goal and strictly better on at
/// least one, honouring each goal's direction.
///
/// # Panics
/// If either vector's length differs from the goal count.
pub fn boolean_dominates(x: &[f64], y: &[f64], spec: &ObjectiveSpec) -> bool {
    check_len(x, y, spec);
    let mut strictly = false;
    for ((&a, &b), d) in x.iter().zip(y).zip(spec.directions()) {
        if d.better(b, a) {
            return false;
        }
        if d.better(a, b) {
            strictly = true;
        }
    }
    strictly
}

/// The pair of losses `(xloss, yloss)` accumulated by the indicator loop.
///
/// Goal values outside `[lo, hi]` are clamped before normalization so the
/// exponent stays within `[-1/n, 1/n]`.
pub fn zitzler_losses(x: &[f64], y: &[f64], spec: &ObjectiveSpec) -> (f64, f64) {
    check_len(x, y, spec);
    let n = spec.goal_count() as f64;
    let (lo, hi) = (spec.lo(), spec.hi());
    let mut xloss = 0.0;
    let mut yloss = 0.0;
    for (g, d) in spec.directions().iter().enumerate() {
        let a = normalize(x[g].clamp(lo[g], hi[g]), lo[g], hi[g]);
        let b = normalize(y[g].clamp(lo[g], hi[g]), lo[g], hi[g]);
        let w = d.weight();
        xloss -= 10f64.powf(w * (a - b) / n);
        yloss -= 10f64.powf(w * (b - a) / n);
    }
    (xloss, yloss)
}

/// Indicator-based comparison: `x` is better than `y` iff `xloss < yloss`.
/// Ties are not "better".
///
/// # Panics
/// If either vector's length differs from the goal count.
pub fn zitzler_better(x: &[f64], y: &[f64], spec: &ObjectiveSpec) -> bool {
    let (xloss, yloss) = zitzler_losses(x, y, spec);
    xloss < yloss
}

fn check_len(x: &[f64], y: &[f64], spec: &ObjectiveSpec) {
    let n = spec.goal_count();
    assert!(
        x.len() == n && y.len() == n,
        "objective length mismatch: {} and {} vs {} goals",
        x.len(),
        y.len(),
        n
    );
}

/// Indices (ascending) of the points not dominated by any other point.
pub fn nondominated_indices<P: AsRef<[f64]>>(points: &[P], spec: &ObjectiveSpec) -> Vec<usize> {
    // A dominator always precedes its victim in lexicographic order of the
    // minimization-oriented vectors, so one sweep against the running front
    // suffices.
    let oriented: Vec<Vec<f64>> = points
        .iter()
        .map(|p| {
            p.as_ref()
                .iter()
                .zip(spec.directions())
                .map(|(&v, d)| d.to_min(v))
                .collect()
        })
        .collect();
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| lex_cmp(&oriented[a], &oriented[b]).then(a.cmp(&b)));

    let mut front: Vec<usize> = Vec::new();
    for i in order {
        let dominated = front
            .iter()
            .any(|&j| boolean_dominates(points[j].as_ref(), points[i].as_ref(), spec));
        if !dominated {
            front.push(i);
        }
    }
    front.sort_unstable();
    front
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// The candidates of `pop` that no other member boolean-dominates, in input
/// order.
pub fn nondominated_filter(pop: &[Candidate], spec: &ObjectiveSpec) -> Result<Vec<Candidate>> {
    let scores = evaluated_scores(pop)?;
    Ok(nondominated_indices(&scores, spec)
        .into_iter()
        .map(|i| pop[i].clone())
        .collect())
}

pub(crate) fn evaluated_scores(pop: &[Candidate]) -> Result<Vec<&[f64]>> {
    pop.iter()
        .enumerate()
        .map(|(i, c)| c.objectives.as_deref().ok_or(Error::Unevaluated(i)))
        .collect()
}
