//! Optimizers: differential evolution, an elitist non-dominated-sorting GA,
//! the SWAY sampler and FLASH sequential model-based search.
//!
//! Every optimizer reports `evals` as the delta of the problem's evaluation
//! counter over the run, and a `front` holding the non-dominated subset of
//! everything it evaluated.

pub(crate) mod de;
mod flash;
mod ga;
mod sway;

pub use de::{de_optimize, DeParams};
pub use flash::{flash_optimize, sample_pool, FlashResult};
pub use ga::{crowding_distance, ga_optimize, nondominated_sort, GaParams};
pub use sway::{sway_sample, sway_eval_bound, SwayParams};

use crate::dominance::{boolean_dominates, zitzler_losses};
use crate::error::Result;
use crate::model::{Candidate, ObjectiveSpec};
use crate::problems::Problem;
use crate::rng::Seed;
use serde::{Deserialize, Serialize};

/// Snapshot taken after each generation (or SWAY level).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationSummary {
    pub generation: usize,
    /// Cumulative evaluations at the end of this generation.
    pub evals: u64,
    pub champion: Vec<f64>,
    pub front_size: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerResult {
    pub front: Vec<Candidate>,
    pub best: Candidate,
    pub evals: u64,
    pub history: Vec<GenerationSummary>,
    /// Every candidate evaluated during the run, in evaluation order.
    pub evaluated: Vec<Candidate>,
}

/// Optimizer choice for code that runs "some optimizer" (ladders, the CLI).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum OptimizerConfig {
    De(DeParams),
    Ga(GaParams),
    Sway(SwayParams),
}

impl OptimizerConfig {
    pub fn run(&self, problem: &mut Problem, seed: Seed) -> Result<OptimizerResult> {
        match self {
            OptimizerConfig::De(p) => de_optimize(problem, p, seed),
            OptimizerConfig::Ga(p) => ga_optimize(problem, p, seed),
            OptimizerConfig::Sway(p) => sway_sample(problem, p.n0, p.stop, seed),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OptimizerConfig::De(_) => "de",
            OptimizerConfig::Ga(_) => "ga",
            OptimizerConfig::Sway(_) => "sway",
        }
    }
}

/// Non-dominated archive of every evaluated candidate, in insertion order.
/// Re-evaluations of identical decisions are kept once.
#[derive(Clone, Debug)]
pub(crate) struct ParetoArchive {
    spec: ObjectiveSpec,
    members: Vec<Candidate>,
}

impl ParetoArchive {
    pub(crate) fn new(spec: ObjectiveSpec) -> Self {
        ParetoArchive {
            spec,
            members: Vec::new(),
        }
    }

    pub(crate) fn insert(&mut self, c: &Candidate) {
        let x = c.scores();
        if self
            .members
            .iter()
            .any(|m| m.decisions == c.decisions || boolean_dominates(m.scores(), x, &self.spec))
        {
            return;
        }
        let spec = &self.spec;
        self.members.retain(|m| !boolean_dominates(x, m.scores(), spec));
        self.members.push(c.clone());
    }

    pub(crate) fn members(&self) -> &[Candidate] {
        &self.members
    }
}

/// Index of the front member with the lowest indicator loss against the
/// front's ideal point (per-goal best value), bounds fitted to the front.
/// Lowest index wins ties.
pub fn champion_index(front: &[Candidate], spec: &ObjectiveSpec) -> Option<usize> {
    let scores: Vec<&[f64]> = front.iter().map(|c| c.scores()).collect();
    let losses = ideal_losses(&scores, spec)?;
    let mut best = 0;
    for (i, &l) in losses.iter().enumerate() {
        if l < losses[best] {
            best = i;
        }
    }
    Some(best)
}

/// Indicator loss of each point when compared against the ideal point of
/// the set. `None` for an empty set.
pub fn ideal_losses(points: &[&[f64]], spec: &ObjectiveSpec) -> Option<Vec<f64>> {
    let first = points.first()?;
    let mut ideal = first.to_vec();
    for p in points {
        for (g, d) in spec.directions().iter().enumerate() {
            if d.better(p[g], ideal[g]) {
                ideal[g] = p[g];
            }
        }
    }
    let mut bounded = spec.clone();
    bounded.fit_bounds(points.iter().copied());
    Some(points.iter().map(|p| zitzler_losses(p, &ideal, &bounded).0).collect())
}

/// Shared bookkeeping of a run: evaluation log, archive and history.
pub(crate) struct RunLog {
    spec: ObjectiveSpec,
    start_evals: u64,
    archive: ParetoArchive,
    evaluated: Vec<Candidate>,
    history: Vec<GenerationSummary>,
}

impl RunLog {
    pub(crate) fn new(problem: &Problem) -> Self {
        let spec = problem.spec();
        RunLog {
            archive: ParetoArchive::new(spec.clone()),
            spec,
            start_evals: problem.evals(),
            evaluated: Vec::new(),
            history: Vec::new(),
        }
    }

    pub(crate) fn evaluate(&mut self, problem: &mut Problem, decisions: &[f64]) -> Result<Candidate> {
        let c = problem.evaluate(decisions)?;
        self.archive.insert(&c);
        self.evaluated.push(c.clone());
        Ok(c)
    }

    pub(crate) fn snapshot(&mut self, generation: usize, problem: &Problem) {
        let front = self.archive.members();
        let champion = champion_index(front, &self.spec)
            .map(|i| front[i].scores().to_vec())
            .unwrap_or_default();
        self.history.push(GenerationSummary {
            generation,
            evals: problem.evals() - self.start_evals,
            champion,
            front_size: front.len(),
        });
    }

    pub(crate) fn finish(self, problem: &Problem) -> OptimizerResult {
        let front = self.archive.members().to_vec();
        let best = champion_index(&front, &self.spec)
            .map(|i| front[i].clone())
            .expect("a run evaluates at least one candidate");
        OptimizerResult {
            front,
            best,
            evals: problem.evals() - self.start_evals,
            history: self.history,
            evaluated: self.evaluated,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dominance::nondominated_filter;

    #[test]
    fn archive_matches_filter() {
        let spec = ObjectiveSpec::minimize(2);
        let pts = [[3.0, 1.0], [1.0, 3.0], [2.0, 2.0], [2.5, 2.5], [1.0, 3.0], [0.5, 4.0], [0.4, 0.4]];
        // Decisions mirror the objectives, so the repeated point is a re-evaluation.
        let cands: Vec<Candidate> = pts.iter().map(|p| Candidate::evaluated(p.to_vec(), p.to_vec())).collect();
        let mut a = ParetoArchive::new(spec.clone());
        for (i, c) in cands.iter().enumerate() {
            a.insert(c);
            let expected = nondominated_filter(&cands[..=i], &spec).unwrap();
            let mut got = a.members().to_vec();
            let key = |c: &Candidate| (c.scores()[0].to_bits(), c.scores()[1].to_bits());
            got.sort_by_key(key);
            let mut exp = expected;
            exp.sort_by_key(key);
            exp.dedup();
            assert_eq!(got, exp);
        }
    }

    #[test]
    fn champion_single_goal_is_minimum() {
        let spec = ObjectiveSpec::minimize(1);
        let front: Vec<Candidate> = [3.0, 1.0, 2.0]
            .iter()
            .map(|&v| Candidate::evaluated(vec![], vec![v]))
            .collect();
        assert_eq!(champion_index(&front, &spec), Some(1));
        assert_eq!(champion_index(&[], &spec), None);
    }
}
