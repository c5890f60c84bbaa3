//! Benchmark problems: goal functions, constraints, decision domains and
//! evaluation accounting.
//!
//! Constraint violations are not used to reject candidates. A constrained
//! problem instead reports one extra minimized goal holding the summed
//! violation, so every optimizer works unchanged on constrained instances.

mod descriptor;
mod product_line;
mod requirements;
mod synthetic;

pub use descriptor::{make_problem, ProblemDescriptor};
pub use product_line::{Feature, ProductLineInstance, Relation};
pub use requirements::RequirementsInstance;
pub use synthetic::{biobjective_curve, configuration_space, sphere};

use crate::error::{Error, Result};
use crate::model::{Candidate, Direction, ObjectiveSpec};
use rand::{Rng, RngCore};
use std::fmt;
use std::sync::Arc;

/// Equality constraints count as satisfied when `|g| <= EQUALITY_TOLERANCE`.
pub const EQUALITY_TOLERANCE: f64 = 1e-6;

/// Name of the synthetic goal appended to constrained problems.
pub const VIOLATION_GOAL: &str = "violation";

/// The set of values one decision may take.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain {
    Real { lo: f64, hi: f64 },
    Integer { lo: i64, hi: i64 },
    Bool,
    /// Pinned to a single value, e.g. after a range has been asserted.
    Fixed(f64),
}

impl Domain {
    pub fn contains(&self, v: f64) -> bool {
        match *self {
            Domain::Real { lo, hi } => v >= lo && v <= hi,
            Domain::Integer { lo, hi } => v.fract() == 0.0 && v >= lo as f64 && v <= hi as f64,
            Domain::Bool => v == 0.0 || v == 1.0,
            Domain::Fixed(x) => v == x,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Domain::Real { lo, hi } if lo < hi => rng.gen_range(lo..=hi),
            Domain::Real { lo, .. } => lo,
            Domain::Integer { lo, hi } => rng.gen_range(lo..=hi) as f64,
            Domain::Bool => {
                if rng.gen_bool(0.5) {
                    1.0
                } else {
                    0.0
                }
            }
            Domain::Fixed(x) => x,
        }
    }

    /// Lower and upper end of the continuous relaxation used by the
    /// real-coded optimizers.
    pub fn span(&self) -> (f64, f64) {
        match *self {
            Domain::Real { lo, hi } => (lo, hi),
            Domain::Integer { lo, hi } => (lo as f64, hi as f64),
            Domain::Bool => (0.0, 1.0),
            Domain::Fixed(x) => (x, x),
        }
    }

    /// Map a value of the continuous relaxation onto the domain: clamp reals,
    /// round integers, threshold booleans at 0.5.
    pub fn decode(&self, v: f64) -> f64 {
        match *self {
            Domain::Real { lo, hi } => v.clamp(lo, hi),
            Domain::Integer { lo, hi } => v.round().clamp(lo as f64, hi as f64),
            Domain::Bool => {
                if v >= 0.5 {
                    1.0
                } else {
                    0.0
                }
            }
            Domain::Fixed(x) => x,
        }
    }

    /// Intersect with the closed interval `[lo, hi]`; `None` when empty.
    pub fn restrict(&self, lo: f64, hi: f64) -> Option<Domain> {
        match *self {
            Domain::Real { lo: a, hi: b } => {
                let (l, h) = (a.max(lo), b.min(hi));
                (l <= h).then_some(if l == h { Domain::Fixed(l) } else { Domain::Real { lo: l, hi: h } })
            }
            Domain::Integer { lo: a, hi: b } => {
                let l = (a as f64).max(lo.ceil()) as i64;
                let h = (b as f64).min(hi.floor()) as i64;
                (l <= h).then_some(if l == h { Domain::Fixed(l as f64) } else { Domain::Integer { lo: l, hi: h } })
            }
            Domain::Bool => {
                let zero = lo <= 0.0 && 0.0 <= hi;
                let one = lo <= 1.0 && 1.0 <= hi;
                match (zero, one) {
                    (true, true) => Some(Domain::Bool),
                    (true, false) => Some(Domain::Fixed(0.0)),
                    (false, true) => Some(Domain::Fixed(1.0)),
                    (false, false) => None,
                }
            }
            Domain::Fixed(x) => (lo <= x && x <= hi).then_some(Domain::Fixed(x)),
        }
    }
}

pub type GoalFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type ConstraintSet = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
pub struct Goal {
    pub name: String,
    pub direction: Direction,
    f: GoalFn,
}

/// An optimization problem together with its evaluation counter.
///
/// Cloning copies the counter; use [`Problem::fresh`] to start a new run.
#[derive(Clone)]
pub struct Problem {
    name: String,
    domains: Vec<Domain>,
    goals: Vec<Goal>,
    inequality: Vec<ConstraintSet>,
    equality: Vec<ConstraintSet>,
    evals: u64,
    cap: Option<u64>,
    sampler: Option<Sampler>,
}

/// Problem-specific generator of random decisions.
pub type Sampler = Arc<dyn Fn(&mut dyn RngCore) -> Vec<f64> + Send + Sync>;

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("arity", &self.domains.len())
            .field("goals", &self.goal_names())
            .field("evals", &self.evals)
            .finish()
    }
}

impl Problem {
    pub fn builder(name: impl Into<String>) -> ProblemBuilder {
        ProblemBuilder {
            problem: Problem {
                name: name.into(),
                domains: Vec::new(),
                goals: Vec::new(),
                inequality: Vec::new(),
                equality: Vec::new(),
                evals: 0,
                cap: None,
                sampler: None,
            },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.domains.len()
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    pub fn is_constrained(&self) -> bool {
        !self.inequality.is_empty() || !self.equality.is_empty()
    }

    /// Goal count as seen by optimizers, including the violation goal.
    pub fn goal_count(&self) -> usize {
        self.goals.len() + usize::from(self.is_constrained())
    }

    pub fn goal_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.goals.iter().map(|g| g.name.clone()).collect();
        if self.is_constrained() {
            names.push(VIOLATION_GOAL.to_string());
        }
        names
    }

    pub fn directions(&self) -> Vec<Direction> {
        let mut dirs: Vec<Direction> = self.goals.iter().map(|g| g.direction).collect();
        if self.is_constrained() {
            dirs.push(Direction::Minimize);
        }
        dirs
    }

    pub fn spec(&self) -> ObjectiveSpec {
        ObjectiveSpec::new(self.directions())
    }

    pub fn evals(&self) -> u64 {
        self.evals
    }

    pub fn cap(&self) -> Option<u64> {
        self.cap
    }

    pub fn set_cap(&mut self, cap: Option<u64>) {
        self.cap = cap;
    }

    /// A copy with the evaluation counter reset to zero.
    pub fn fresh(&self) -> Problem {
        Problem {
            evals: 0,
            ..self.clone()
        }
    }

    /// Summed violation: positive parts of inequalities plus the magnitude of
    /// equalities outside tolerance. Does not touch the counter.
    pub fn violation(&self, decisions: &[f64]) -> f64 {
        let mut total = 0.0;
        for g in &self.inequality {
            total += g(decisions).into_iter().map(|v| v.max(0.0)).sum::<f64>();
        }
        for h in &self.equality {
            total += h(decisions)
                .into_iter()
                .map(f64::abs)
                .filter(|v| *v > EQUALITY_TOLERANCE)
                .sum::<f64>();
        }
        total
    }

    /// Evaluate one decision vector, charging one evaluation.
    pub fn evaluate(&mut self, decisions: &[f64]) -> Result<Candidate> {
        if decisions.len() != self.arity() {
            return Err(Error::Contract(format!(
                "expected {} decisions, got {}",
                self.arity(),
                decisions.len()
            )));
        }
        for (index, (&value, d)) in decisions.iter().zip(&self.domains).enumerate() {
            if !d.contains(value) {
                return Err(Error::OutOfDomain { index, value });
            }
        }
        if let Some(cap) = self.cap {
            if self.evals >= cap {
                return Err(Error::BudgetExhausted { cap });
            }
        }
        self.evals += 1;
        let mut objectives: Vec<f64> = self.goals.iter().map(|g| (g.f)(decisions)).collect();
        if self.is_constrained() {
            objectives.push(self.violation(decisions));
        }
        Ok(Candidate::evaluated(decisions.to_vec(), objectives))
    }

    /// Evaluate a candidate in place of its (possibly stale) scores.
    pub fn evaluate_candidate(&mut self, c: Candidate) -> Result<Candidate> {
        self.evaluate(&c.decisions)
    }

    /// Uniform over each domain, or the problem's own sampler (decoded into
    /// the current, possibly restricted, domains).
    pub fn random_decisions<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        match &self.sampler {
            Some(s) => self.decode(&s(rng)),
            None => self.domains.iter().map(|d| d.sample(rng)).collect(),
        }
    }

    /// Decode a vector of the continuous relaxation into valid decisions.
    pub fn decode(&self, genome: &[f64]) -> Vec<f64> {
        genome
            .iter()
            .zip(&self.domains)
            .map(|(&v, d)| d.decode(v))
            .collect()
    }

    /// Narrow decision `index` to `[lo, hi]`. Fails when the intersection
    /// with the current domain is empty.
    pub fn restrict(&mut self, index: usize, lo: f64, hi: f64) -> Result<()> {
        let d = self
            .domains
            .get(index)
            .ok_or_else(|| Error::invalid(format!("no decision {index}")))?;
        match d.restrict(lo, hi) {
            Some(nd) => {
                self.domains[index] = nd;
                Ok(())
            }
            None => Err(Error::Contract(format!(
                "range [{lo}, {hi}] conflicts with domain of decision {index}"
            ))),
        }
    }
}

pub struct ProblemBuilder {
    problem: Problem,
}

impl ProblemBuilder {
    pub fn decision(mut self, d: Domain) -> Self {
        self.problem.domains.push(d);
        self
    }

    pub fn decisions(mut self, count: usize, d: Domain) -> Self {
        self.problem.domains.extend(std::iter::repeat_n(d, count));
        self
    }

    pub fn goal<F>(mut self, name: impl Into<String>, direction: Direction, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        self.problem.goals.push(Goal {
            name: name.into(),
            direction,
            f: Arc::new(f),
        });
        self
    }

    /// A constraint `g(x) <= 0`.
    pub fn inequality<F>(self, g: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        self.inequality_set(move |x| vec![g(x)])
    }

    /// Several `g_j(x) <= 0` computed together.
    pub fn inequality_set<F>(mut self, g: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        self.problem.inequality.push(Arc::new(g));
        self
    }

    /// A constraint `h(x) = 0` (within [`EQUALITY_TOLERANCE`]).
    pub fn equality<F>(mut self, h: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        self.problem.equality.push(Arc::new(move |x| vec![h(x)]));
        self
    }

    pub fn cap(mut self, cap: u64) -> Self {
        self.problem.cap = Some(cap);
        self
    }

    /// Replace uniform sampling of random decisions.
    pub fn sampler<F>(mut self, f: F) -> Self
    where
        F: Fn(&mut dyn RngCore) -> Vec<f64> + Send + Sync + 'static,
    {
        self.problem.sampler = Some(Arc::new(f));
        self
    }

    pub fn build(self) -> Result<Problem> {
        let p = self.problem;
        if p.goals.is_empty() {
            return Err(Error::invalid(format!("problem `{}` has no goals", p.name)));
        }
        if p.domains.is_empty() {
            return Err(Error::invalid(format!("problem `{}` has no decisions", p.name)));
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Seed;

    fn toy() -> Problem {
        Problem::builder("toy")
            .decisions(2, Domain::Real { lo: -1.0, hi: 1.0 })
            .goal("sum", Direction::Minimize, |x| x[0] + x[1])
            .inequality(|x| x[0] - 0.5)
            .equality(|x| x[1])
            .build()
            .unwrap()
    }

    #[test]
    fn counter_increments_by_one() {
        let mut p = toy();
        for k in 0..5 {
            assert_eq!(p.evals(), k);
            p.evaluate(&[0.0, 0.0]).unwrap();
        }
        assert_eq!(p.evals(), 5);
        assert_eq!(p.fresh().evals(), 0);
    }

    #[test]
    fn violation_goal_appended() {
        let mut p = toy();
        assert_eq!(p.goal_count(), 2);
        assert_eq!(p.goal_names(), vec!["sum", VIOLATION_GOAL]);
        let c = p.evaluate(&[1.0, 0.25]).unwrap();
        assert!((c.scores()[1] - 0.75).abs() < 1e-12);
        let c = p.evaluate(&[0.0, 5e-7]).unwrap();
        assert_eq!(c.scores()[1], 0.0);
    }

    #[test]
    fn cap_is_enforced() {
        let mut p = toy();
        p.set_cap(Some(2));
        p.evaluate(&[0.0, 0.0]).unwrap();
        p.evaluate(&[0.0, 0.0]).unwrap();
        assert!(matches!(p.evaluate(&[0.0, 0.0]), Err(Error::BudgetExhausted { cap: 2 })));
        assert_eq!(p.evals(), 2);
    }

    #[test]
    fn out_of_domain_rejected_without_charge() {
        let mut p = toy();
        assert!(matches!(p.evaluate(&[2.0, 0.0]), Err(Error::OutOfDomain { index: 0, .. })));
        assert!(p.evaluate(&[0.0]).is_err());
        assert_eq!(p.evals(), 0);
    }

    #[test]
    fn evaluation_is_pure() {
        let mut p = toy();
        let a = p.evaluate(&[0.3, -0.2]).unwrap();
        let b = p.evaluate(&[0.3, -0.2]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn domain_restrict_and_decode() {
        assert_eq!(Domain::Bool.restrict(1.0, 1.0), Some(Domain::Fixed(1.0)));
        assert_eq!(Domain::Bool.restrict(0.0, 1.0), Some(Domain::Bool));
        assert_eq!(Domain::Fixed(0.0).restrict(1.0, 1.0), None);
        assert_eq!(
            Domain::Real { lo: 0.0, hi: 10.0 }.restrict(2.0, 20.0),
            Some(Domain::Real { lo: 2.0, hi: 10.0 })
        );
        assert_eq!(Domain::Integer { lo: 0, hi: 4 }.restrict(1.5, 2.5), Some(Domain::Fixed(2.0)));
        assert_eq!(Domain::Bool.decode(0.49), 0.0);
        assert_eq!(Domain::Bool.decode(0.5), 1.0);
        assert_eq!(Domain::Integer { lo: 0, hi: 4 }.decode(7.2), 4.0);
    }

    #[test]
    fn random_decisions_lie_in_domain() {
        let p = make_problem(&"product-line(features=30,seed=2)".parse().unwrap()).unwrap();
        let mut rng = Seed(1).rng();
        for _ in 0..50 {
            let d = p.random_decisions(&mut rng);
            assert!(d.iter().zip(p.domains()).all(|(&v, dom)| dom.contains(v)));
        }
    }
}
