//! STAR contrast-set ranking. Evaluated candidates are split into a small
//! "best" set and the "rest"; every discretized decision range is scored by
//! `s = b^n / (b + r)` where `b` and `r` are its frequencies in best and
//! rest. The decision ladder then re-runs an optimizer with the top-1,
//! top-2, ... ranges pinned.

use crate::dominance::evaluated_scores;
use crate::error::{Error, Result};
use crate::miners::{discretize_values, Range};
use crate::model::{Candidate, ObjectiveSpec};
use crate::optimizers::{ideal_losses, OptimizerConfig};
use crate::problems::Problem;
use crate::rng::Seed;
use serde::{Deserialize, Serialize};

/// Default support exponent `n`.
pub const SUPPORT_EXPONENT: f64 = 2.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RangeScore {
    /// Decision index.
    pub column: usize,
    pub range: Range,
    /// Frequency in best / |best|.
    pub b: f64,
    /// Frequency in rest / |rest|.
    pub r: f64,
    pub s: f64,
    pub support_exponent: f64,
}

/// `b^n / (b + r)`; `None` when the range occurs nowhere.
pub fn star_score(b: f64, r: f64, n: f64) -> Option<f64> {
    let denom = b + r;
    (denom > 0.0).then(|| b.powf(n) / denom)
}

/// Sort by indicator loss against the population's ideal point and cut the
/// first `floor(ratio * N)` off as "best".
pub fn split_best_rest(
    evaluated: &[Candidate],
    ratio: f64,
    spec: &ObjectiveSpec,
) -> Result<(Vec<Candidate>, Vec<Candidate>)> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::invalid(format!("best ratio {ratio} outside (0, 1)")));
    }
    let scores = evaluated_scores(evaluated)?;
    let losses = ideal_losses(&scores, spec).unwrap_or_default();
    let mut order: Vec<usize> = (0..evaluated.len()).collect();
    order.sort_by(|&a, &b| losses[a].total_cmp(&losses[b]).then(a.cmp(&b)));
    let cut = (ratio * evaluated.len() as f64).floor() as usize;
    let best = order[..cut].iter().map(|&i| evaluated[i].clone()).collect();
    let rest = order[cut..].iter().map(|&i| evaluated[i].clone()).collect();
    Ok((best, rest))
}

/// Candidate ranges of one decision.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnRanges {
    pub column: usize,
    pub ranges: Vec<Range>,
}

/// Equal-frequency ranges of every decision over `candidates`.
pub fn decision_ranges(candidates: &[Candidate], bins: usize) -> Vec<ColumnRanges> {
    let width = candidates.first().map_or(0, |c| c.decisions.len());
    (0..width)
        .map(|column| {
            let values: Vec<f64> = candidates.iter().map(|c| c.decisions[column]).collect();
            ColumnRanges {
                column,
                ranges: discretize_values(&values, bins),
            }
        })
        .collect()
}

/// Score every (decision, range) pair and sort descending by `s`, then `b`,
/// then decision index and range order. Ranges absent from both sets are
/// dropped.
pub fn rank_ranges(
    best: &[Candidate],
    rest: &[Candidate],
    ranges: &[ColumnRanges],
    n: f64,
) -> Result<Vec<RangeScore>> {
    if best.is_empty() {
        return Err(Error::Empty("best set"));
    }
    let freq = |set: &[Candidate], col: usize, range: &Range| -> f64 {
        if set.is_empty() {
            return 0.0;
        }
        set.iter()
            .filter(|c| c.decisions.get(col).is_some_and(|&v| range.contains_num(v)))
            .count() as f64
            / set.len() as f64
    };
    let mut scored: Vec<(usize, RangeScore)> = Vec::new();
    for cr in ranges {
        for range in &cr.ranges {
            let b = freq(best, cr.column, range);
            let r = freq(rest, cr.column, range);
            if let Some(s) = star_score(b, r, n) {
                let order = scored.len();
                scored.push((
                    order,
                    RangeScore {
                        column: cr.column,
                        range: range.clone(),
                        b,
                        r,
                        s,
                        support_exponent: n,
                    },
                ));
            }
        }
    }
    scored.sort_by(|(oa, a), (ob, b)| {
        b.s.total_cmp(&a.s)
            .then(b.b.total_cmp(&a.b))
            .then(a.column.cmp(&b.column))
            .then(oa.cmp(ob))
    });
    Ok(scored.into_iter().map(|(_, s)| s).collect())
}

/// One ladder step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rung {
    /// Number of top ranges asserted.
    pub depth: usize,
    pub asserted: Vec<RangeScore>,
    pub champion: Vec<f64>,
    pub evals: u64,
    pub front_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionLadder {
    /// Plain run with nothing asserted.
    pub baseline: Rung,
    /// `rungs[i]` asserts the top `i + 1` ranges.
    pub rungs: Vec<Rung>,
    /// Depth whose range conflicted with those above it, if any.
    pub conflict_at: Option<usize>,
}

impl DecisionLadder {
    pub fn total_evals(&self) -> u64 {
        self.baseline.evals + self.rungs.iter().map(|r| r.evals).sum::<u64>()
    }
}

/// Re-run the optimizer with the top-`i` ranges pinned, for `i = 0..=L`
/// where `L = min(|ranked|, max_rungs, depth before the first conflict)`.
/// Run `i` uses `seed.derive(i)` on a fresh copy of `problem`.
pub fn decision_ladder(
    problem: &Problem,
    config: &OptimizerConfig,
    ranked: &[RangeScore],
    max_rungs: usize,
    seed: Seed,
) -> Result<DecisionLadder> {
    if ranked.is_empty() {
        return Err(Error::Empty("ranked ranges"));
    }
    let run = |depth: usize, p: &mut Problem| -> Result<Rung> {
        let res = config
            .run(p, seed.derive(depth as u64))
            .map_err(|e| Error::Rung { rung: depth, source: Box::new(e) })?;
        debug_assert_eq!(res.evals, p.evals());
        Ok(Rung {
            depth,
            asserted: ranked[..depth].to_vec(),
            champion: res.best.scores().to_vec(),
            evals: res.evals,
            front_size: res.front.len(),
        })
    };
    let baseline = run(0, &mut problem.fresh())?;

    let mut constrained = problem.fresh();
    let mut rungs = Vec::new();
    let mut conflict_at = None;
    for depth in 1..=ranked.len().min(max_rungs) {
        let rs = &ranked[depth - 1];
        let ok = match rs.range {
            Range::Numeric { lo, hi } => constrained.restrict(rs.column, lo, hi).is_ok(),
            Range::Category(_) => false,
        };
        if !ok {
            conflict_at = Some(depth);
            break;
        }
        let mut p = constrained.fresh();
        rungs.push(run(depth, &mut p)?);
    }
    Ok(DecisionLadder {
        baseline,
        rungs,
        conflict_at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizers::DeParams;
    use crate::problems::sphere;

    #[test]
    fn score_examples() {
        assert_eq!(star_score(0.0, 0.3, 2.0), Some(0.0));
        assert_eq!(star_score(0.0, 0.0, 2.0), None);
        assert!((star_score(0.1, 0.0, 2.0).unwrap() - 0.1).abs() < 1e-15);
        assert!((star_score(0.05, 0.01, 2.0).unwrap() - 0.0025 / 0.06).abs() < 1e-15);
    }

    #[test]
    fn split_sizes_and_partition() {
        let spec = ObjectiveSpec::minimize(1);
        let cands: Vec<Candidate> = (0..100)
            .map(|i| Candidate::evaluated(vec![i as f64], vec![((i * 37) % 100) as f64]))
            .collect();
        let (best, rest) = split_best_rest(&cands, 0.1, &spec).unwrap();
        assert_eq!((best.len(), rest.len()), (10, 90));
        assert!(best.iter().all(|c| c.scores()[0] < 10.0));
        assert!(split_best_rest(&cands, 1.0, &spec).is_err());
        assert!(split_best_rest(&cands, 0.0, &spec).is_err());
    }

    #[test]
    fn ladder_truncates_on_conflict() {
        let p = sphere(2).unwrap();
        let mk = |column, lo, hi, s| RangeScore {
            column,
            range: Range::Numeric { lo, hi },
            b: s,
            r: 0.0,
            s,
            support_exponent: 2.0,
        };
        let ranked = vec![mk(0, -1.0, 1.0, 0.9), mk(1, 0.0, 2.0, 0.8), mk(0, 3.0, 4.0, 0.7), mk(1, 0.5, 1.0, 0.6)];
        let config = OptimizerConfig::De(DeParams { np: 8, f: 0.75, cr: 0.3, generations: 2 });
        let ladder = decision_ladder(&p, &config, &ranked, 10, Seed(1)).unwrap();
        assert_eq!(ladder.rungs.len(), 2);
        assert_eq!(ladder.conflict_at, Some(3));
        assert_eq!(ladder.total_evals(), 3 * 24);

        let short = decision_ladder(&p, &config, &ranked, 1, Seed(1)).unwrap();
        assert_eq!(short.rungs.len(), 1);
        assert!(decision_ladder(&p, &config, &[], 3, Seed(1)).is_err());
    }
}
