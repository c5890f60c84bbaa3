use super::{Domain, Problem};
use crate::error::{Error, Result};
use crate::model::Direction;
use crate::rng::Seed;
use rand::{Rng, RngCore};
use std::collections::BTreeMap;
use std::sync::Arc;

/// How a feature hangs off its parent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Root,
    /// Selected whenever the parent is.
    Mandatory,
    Optional,
    /// Exactly one member of the group is selected whenever the parent is.
    Alternative(u32),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Feature {
    pub name: String,
    pub parent: Option<usize>,
    pub relation: Relation,
    pub cost: f64,
}

/// A feature model: a tree of options plus cross-tree CNF clauses.
///
/// Clause literals are 1-based feature indices; a negative literal means
/// "not selected".
#[derive(Clone, Debug, PartialEq)]
pub struct ProductLineInstance {
    pub features: Vec<Feature>,
    pub clauses: Vec<Vec<i64>>,
}

impl ProductLineInstance {
    pub fn new(features: Vec<Feature>, clauses: Vec<Vec<i64>>) -> Result<Self> {
        let inst = ProductLineInstance { features, clauses };
        inst.validate()?;
        Ok(inst)
    }

    fn validate(&self) -> Result<()> {
        let n = self.features.len();
        if n == 0 {
            return Err(Error::Empty("feature model"));
        }
        let roots: Vec<usize> = (0..n).filter(|&i| self.features[i].parent.is_none()).collect();
        if roots.len() != 1 {
            return Err(Error::invalid(format!("feature model needs one root, found {}", roots.len())));
        }
        for (i, f) in self.features.iter().enumerate() {
            match (f.parent, f.relation) {
                (None, Relation::Root) => {}
                (None, _) | (Some(_), Relation::Root) => {
                    return Err(Error::invalid(format!("feature {i}: root relation mismatch")))
                }
                (Some(p), _) if p >= n => {
                    return Err(Error::invalid(format!("feature {i}: parent {p} does not exist")))
                }
                _ => {}
            }
            // Walking up from any feature must reach the root within n steps.
            let mut cur = i;
            let mut steps = 0;
            while let Some(p) = self.features[cur].parent {
                cur = p;
                steps += 1;
                if steps > n {
                    return Err(Error::invalid(format!("feature {i} is on a cycle")));
                }
            }
        }
        for clause in &self.clauses {
            for &lit in clause {
                if lit == 0 || lit.unsigned_abs() as usize > n {
                    return Err(Error::invalid(format!("clause literal {lit} references no feature")));
                }
            }
        }
        Ok(())
    }

    /// Root with two alternative children and the clause "not both".
    pub fn tiny() -> Self {
        let f = |name: &str, parent, relation, cost| Feature {
            name: name.to_string(),
            parent,
            relation,
            cost,
        };
        ProductLineInstance::new(
            vec![
                f("root", None, Relation::Root, 1.0),
                f("a", Some(0), Relation::Alternative(0), 2.0),
                f("b", Some(0), Relation::Alternative(0), 3.0),
            ],
            vec![vec![-2, -3]],
        )
        .expect("tiny model is valid")
    }

    /// Random feature tree with `n` features and about `n / 5` two-literal
    /// requires/excludes clauses.
    pub fn random(n: usize, seed: Seed) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("product line needs at least 2 features"));
        }
        let mut rng = seed.rng();
        let mut features = vec![Feature {
            name: "f0".into(),
            parent: None,
            relation: Relation::Root,
            cost: rng.gen_range(1..=10) as f64,
        }];
        let mut next_group = 0u32;
        // parent -> its alternative group, if it has one
        let mut groups: BTreeMap<usize, u32> = BTreeMap::new();
        for i in 1..n {
            let parent = rng.gen_range(i.saturating_sub(6)..i);
            let roll: f64 = rng.gen();
            let relation = if roll < 0.15 {
                Relation::Mandatory
            } else if roll < 0.65 {
                Relation::Optional
            } else {
                let g = *groups.entry(parent).or_insert_with(|| {
                    next_group += 1;
                    next_group - 1
                });
                Relation::Alternative(g)
            };
            features.push(Feature {
                name: format!("f{i}"),
                parent: Some(parent),
                relation,
                cost: rng.gen_range(1..=10) as f64,
            });
        }
        let mut clauses = Vec::new();
        for _ in 0..(n / 5).max(1) {
            let a = rng.gen_range(1..n) as i64 + 1;
            let mut b = rng.gen_range(1..n) as i64 + 1;
            if b == a {
                b = if a == n as i64 { 2 } else { a + 1 };
            }
            if rng.gen_bool(0.5) {
                clauses.push(vec![-a, b]);
            } else {
                clauses.push(vec![-a, -b]);
            }
        }
        ProductLineInstance::new(features, clauses)
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    /// Number of violated tree rules and cross-tree clauses.
    pub fn violations(&self, selection: &[f64]) -> usize {
        let on = |i: usize| selection[i] >= 0.5;
        let mut count = 0;
        let mut group_counts: BTreeMap<(usize, u32), usize> = BTreeMap::new();
        for (i, f) in self.features.iter().enumerate() {
            match (f.parent, f.relation) {
                (None, _) => count += usize::from(!on(i)),
                (Some(p), rel) => {
                    if on(i) && !on(p) {
                        count += 1;
                    }
                    match rel {
                        Relation::Mandatory if on(p) && !on(i) => count += 1,
                        Relation::Alternative(g) => {
                            *group_counts.entry((p, g)).or_default() += usize::from(on(i));
                        }
                        _ => {}
                    }
                }
            }
        }
        for (&(p, _), &selected) in &group_counts {
            if on(p) && selected != 1 {
                count += 1;
            }
        }
        for clause in &self.clauses {
            let satisfied = clause.iter().any(|&lit| {
                let idx = lit.unsigned_abs() as usize - 1;
                on(idx) == (lit > 0)
            });
            count += usize::from(!satisfied);
        }
        count
    }

    pub fn cost(&self, selection: &[f64]) -> f64 {
        selection
            .iter()
            .zip(&self.features)
            .filter(|(s, _)| **s >= 0.5)
            .map(|(_, f)| f.cost)
            .sum()
    }

    /// A product consistent with the feature tree: the root, every mandatory
    /// child of a selected feature, each optional child with probability 1/2
    /// and exactly one member of each alternative group. Cross-tree clauses
    /// are not enforced.
    pub fn sample_tree(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        let n = self.features.len();
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut root = 0;
        for (i, f) in self.features.iter().enumerate() {
            match f.parent {
                Some(p) => children[p].push(i),
                None => root = i,
            }
        }
        let mut picked = vec![0.0; n];
        let mut stack = vec![root];
        picked[root] = 1.0;
        while let Some(p) = stack.pop() {
            let mut groups: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
            for &c in &children[p] {
                let take = match self.features[c].relation {
                    Relation::Mandatory => true,
                    Relation::Optional => rng.gen_bool(0.5),
                    Relation::Alternative(g) => {
                        groups.entry(g).or_default().push(c);
                        false
                    }
                    Relation::Root => false,
                };
                if take {
                    picked[c] = 1.0;
                    stack.push(c);
                }
            }
            for members in groups.values() {
                let c = members[rng.gen_range(0..members.len())];
                picked[c] = 1.0;
                stack.push(c);
            }
        }
        picked
    }

    /// Goals: cost (min), selected features (max), violations (min, as the
    /// appended constraint goal). Random decisions come from
    /// [`sample_tree`](Self::sample_tree).
    pub fn into_problem(self) -> Result<Problem> {
        let inst = Arc::new(self);
        let (a, b, c) = (inst.clone(), inst.clone(), inst.clone());
        Problem::builder(format!("product-line(features={})", inst.len()))
            .decisions(inst.len(), Domain::Bool)
            .goal("cost", Direction::Minimize, move |x| a.cost(x))
            .goal("features", Direction::Maximize, |x| x.iter().sum())
            .inequality(move |x| b.violations(x) as f64)
            .sampler(move |rng| c.sample_tree(rng))
            .build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_model_violations() {
        let m = ProductLineInstance::tiny();
        assert_eq!(m.violations(&[1.0, 1.0, 0.0]), 0);
        assert_eq!(m.violations(&[1.0, 0.0, 1.0]), 0);
        // Both alternatives: group rule and the clause both fail.
        assert_eq!(m.violations(&[1.0, 1.0, 1.0]), 2);
        // Nothing selected: root missing.
        assert_eq!(m.violations(&[0.0, 0.0, 0.0]), 1);
        // Child without parent, and root missing.
        assert_eq!(m.violations(&[0.0, 1.0, 0.0]), 2);
    }

    #[test]
    fn tree_samples_respect_the_tree() {
        let m = ProductLineInstance::random(40, Seed(3)).unwrap();
        let mut rng = Seed(8).rng();
        for _ in 0..200 {
            let x = m.sample_tree(&mut rng);
            let clauses = m.clauses.iter().filter(|c| !c.iter().any(|&l| {
                let v = x[l.unsigned_abs() as usize - 1] > 0.5;
                if l > 0 { v } else { !v }
            })).count();
            assert_eq!(m.violations(&x), clauses);
        }
    }

    #[test]
    fn validation_catches_bad_models() {
        let mut m = ProductLineInstance::tiny();
        m.clauses.push(vec![9]);
        assert!(m.validate().is_err());

        let mut m = ProductLineInstance::tiny();
        m.features[0].parent = Some(1);
        m.features[0].relation = Relation::Optional;
        assert!(m.validate().is_err());
    }

    #[test]
    fn random_models_are_valid_and_deterministic() {
        let a = ProductLineInstance::random(40, Seed(3)).unwrap();
        let b = ProductLineInstance::random(40, Seed(3)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 40);
    }
}
