//! Candidates, goal directions and the per-goal bounds used for normalization.

use serde::{Deserialize, Serialize};

/// Optimization direction of one goal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Minimize,
    Maximize,
}

impl Direction {
    /// `-1` for minimize, `+1` for maximize.
    pub fn weight(self) -> f64 {
        match self {
            Direction::Minimize => -1.0,
            Direction::Maximize => 1.0,
        }
    }

    /// True when `a` is strictly better than `b` in this direction.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Direction::Minimize => a < b,
            Direction::Maximize => a > b,
        }
    }

    /// Map a value so that smaller is always better.
    pub fn to_min(self, v: f64) -> f64 {
        match self {
            Direction::Minimize => v,
            Direction::Maximize => -v,
        }
    }
}

/// Goal directions plus the running `lo`/`hi` bounds that the indicator
/// predicate normalizes against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    directions: Vec<Direction>,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl ObjectiveSpec {
    /// Bounds start as the unit interval for every goal.
    pub fn new(directions: Vec<Direction>) -> Self {
        let n = directions.len();
        ObjectiveSpec {
            directions,
            lo: vec![0.0; n],
            hi: vec![1.0; n],
        }
    }

    pub fn minimize(goals: usize) -> Self {
        Self::new(vec![Direction::Minimize; goals])
    }

    /// # Panics
    /// If lengths differ or some `lo[g] > hi[g]`.
    pub fn with_bounds(mut self, lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), self.directions.len(), "lo length");
        assert_eq!(hi.len(), self.directions.len(), "hi length");
        assert!(lo.iter().zip(&hi).all(|(l, h)| l <= h), "lo must not exceed hi");
        self.lo = lo;
        self.hi = hi;
        self
    }

    pub fn goal_count(&self) -> usize {
        self.directions.len()
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    pub fn weights(&self) -> Vec<f64> {
        self.directions.iter().map(|d| d.weight()).collect()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    /// Reset the bounds to the per-goal min/max of `points`. Leaves the
    /// bounds untouched when `points` is empty.
    pub fn fit_bounds<'a, I>(&mut self, points: I)
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let n = self.goal_count();
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        let mut seen = false;
        for p in points {
            assert_eq!(p.len(), n, "objective vector length");
            seen = true;
            for g in 0..n {
                lo[g] = lo[g].min(p[g]);
                hi[g] = hi[g].max(p[g]);
            }
        }
        if seen {
            self.lo = lo;
            self.hi = hi;
        }
    }

    /// Widen the bounds so they cover `point`.
    pub fn include(&mut self, point: &[f64]) {
        assert_eq!(point.len(), self.goal_count(), "objective vector length");
        for (g, &v) in point.iter().enumerate() {
            self.lo[g] = self.lo[g].min(v);
            self.hi[g] = self.hi[g].max(v);
        }
    }
}

/// A decision vector and, once evaluated, its goal scores.
///
/// Boolean decisions are stored as `0.0` / `1.0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub decisions: Vec<f64>,
    pub objectives: Option<Vec<f64>>,
}

impl Candidate {
    pub fn new(decisions: Vec<f64>) -> Self {
        Candidate {
            decisions,
            objectives: None,
        }
    }

    pub fn evaluated(decisions: Vec<f64>, objectives: Vec<f64>) -> Self {
        Candidate {
            decisions,
            objectives: Some(objectives),
        }
    }

    pub fn is_evaluated(&self) -> bool {
        self.objectives.is_some()
    }

    /// # Panics
    /// If the candidate has not been evaluated.
    pub fn scores(&self) -> &[f64] {
        self.objectives
            .as_deref()
            .expect("candidate has not been evaluated")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_bounds_keeps_lo_le_hi() {
        let mut spec = ObjectiveSpec::minimize(2);
        let pts = [vec![3.0, -1.0], vec![1.0, 4.0]];
        spec.fit_bounds(pts.iter().map(|p| p.as_slice()));
        assert_eq!(spec.lo(), &[1.0, -1.0]);
        assert_eq!(spec.hi(), &[3.0, 4.0]);
        spec.include(&[5.0, 0.0]);
        assert_eq!(spec.hi(), &[5.0, 4.0]);
        assert!(spec.lo().iter().zip(spec.hi()).all(|(l, h)| l <= h));
    }

    #[test]
    fn weights_follow_directions() {
        let spec = ObjectiveSpec::new(vec![Direction::Minimize, Direction::Maximize]);
        assert_eq!(spec.weights(), vec![-1.0, 1.0]);
    }
}
