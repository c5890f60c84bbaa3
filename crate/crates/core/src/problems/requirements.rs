use super::{Domain, Problem};
use crate::error::{Error, Result};
use crate::model::Direction;
use crate::rng::Seed;
use rand::Rng;
use std::sync::Arc;

/// Next-release selection: pick requirements maximizing value subject to a
/// cost budget.
#[derive(Clone, Debug, PartialEq)]
pub struct RequirementsInstance {
    pub values: Vec<f64>,
    pub costs: Vec<f64>,
    pub budget: f64,
}

impl RequirementsInstance {
    pub fn new(values: Vec<f64>, costs: Vec<f64>, budget: f64) -> Result<Self> {
        if values.len() != costs.len() {
            return Err(Error::invalid("requirements values and costs differ in length"));
        }
        if values.is_empty() {
            return Err(Error::Empty("requirements"));
        }
        if budget.is_nan() || budget < 0.0 {
            return Err(Error::invalid("requirements budget must be >= 0"));
        }
        Ok(RequirementsInstance { values, costs, budget })
    }

    /// Integer values and costs in `1..=20`, budget half the total cost.
    pub fn random(n: usize, seed: Seed) -> Result<Self> {
        let mut rng = seed.rng();
        let values: Vec<f64> = (0..n).map(|_| rng.gen_range(1..=20) as f64).collect();
        let costs: Vec<f64> = (0..n).map(|_| rng.gen_range(1..=20) as f64).collect();
        let budget = (costs.iter().sum::<f64>() * 0.5).round();
        Self::new(values, costs, budget)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, selection: &[f64]) -> f64 {
        selection.iter().zip(&self.values).map(|(s, v)| s * v).sum()
    }

    pub fn cost(&self, selection: &[f64]) -> f64 {
        selection.iter().zip(&self.costs).map(|(s, c)| s * c).sum()
    }

    /// Boolean decisions; goals are value (max) and cost (min), with
    /// `cost - budget <= 0` as the constraint.
    pub fn into_problem(self) -> Result<Problem> {
        let inst = Arc::new(self);
        let (a, b, c) = (inst.clone(), inst.clone(), inst.clone());
        Problem::builder(format!("requirements(n={})", inst.len()))
            .decisions(inst.len(), Domain::Bool)
            .goal("value", Direction::Maximize, move |x| a.value(x))
            .goal("cost", Direction::Minimize, move |x| b.cost(x))
            .inequality(move |x| c.cost(x) - c.budget)
            .build()
    }
}
