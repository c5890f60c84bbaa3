//! Classification and regression trees.
//!
//! Splits maximize the drop in impurity: summed squared error for numeric
//! targets, Gini for categorical ones. Growth stops at `max_depth`, when a
//! child would hold fewer than `min_leaf` rows, or when no split gains.

use super::dataset::{ColumnKind, Dataset, Value};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartParams {
    /// `None` grows until leaves are pure or `min_leaf` binds.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
}

impl Default for CartParams {
    fn default() -> Self {
        CartParams {
            max_depth: Some(20),
            min_leaf: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Prediction {
    /// Mean target of the leaf.
    Value(f64),
    /// Class frequencies of the leaf, aligned with [`Tree::labels`].
    Distribution(Vec<f64>),
}

/// Rows satisfying the rule go left.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SplitRule {
    Below(f64),
    OneOf(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Leaf {
        prediction: Prediction,
        size: usize,
    },
    Split {
        column: usize,
        rule: SplitRule,
        gain: f64,
        size: usize,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    pub fn size(&self) -> usize {
        match self {
            TreeNode::Leaf { size, .. } | TreeNode::Split { size, .. } => *size,
        }
    }

    fn visit<'a>(&'a self, depth: usize, f: &mut impl FnMut(&'a TreeNode, usize)) {
        f(self, depth);
        if let TreeNode::Split { left, right, .. } = self {
            left.visit(depth + 1, f);
            right.visit(depth + 1, f);
        }
    }
}

/// A fitted tree. Immutable after construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    root: TreeNode,
    labels: Vec<String>,
}

impl Tree {
    pub fn root(&self) -> &TreeNode {
        &self.root
    }

    /// Class labels for classification trees; empty for regression.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn is_classifier(&self) -> bool {
        !self.labels.is_empty()
    }

    /// Depth of the deepest leaf; a lone leaf has depth 0.
    pub fn depth(&self) -> usize {
        let mut max = 0;
        self.root.visit(0, &mut |_, d| max = max.max(d));
        max
    }

    pub fn leaf_sizes(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.root.visit(0, &mut |n, _| {
            if let TreeNode::Leaf { size, .. } = n {
                out.push(*size);
            }
        });
        out
    }

    pub fn split_gains(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.root.visit(0, &mut |n, _| {
            if let TreeNode::Split { gain, .. } = n {
                out.push(*gain);
            }
        });
        out
    }

    /// Route a dataset row (indexed by dataset column) to its leaf.
    pub fn predict(&self, row: &[Value]) -> Result<&Prediction> {
        self.route(|col| match row.get(col) {
            None => Err(Error::MissingColumn(col)),
            Some(Value::Num(v)) => Ok(Key::Num(*v)),
            Some(Value::Cat(s)) => Ok(Key::Cat(s)),
        })
    }

    /// Route a purely numeric row (as used by [`Tree::fit_matrix`]).
    pub fn predict_numeric(&self, row: &[f64]) -> Result<&Prediction> {
        self.route(|col| row.get(col).map(|v| Key::Num(*v)).ok_or(Error::MissingColumn(col)))
    }

    /// Mean prediction of a regression tree.
    pub fn predict_value(&self, row: &[f64]) -> Result<f64> {
        match self.predict_numeric(row)? {
            Prediction::Value(v) => Ok(*v),
            Prediction::Distribution(_) => Err(Error::Contract("classification tree has no mean".into())),
        }
    }

    /// Probability of `label` at the leaf reached by `row`.
    pub fn class_probability(&self, row: &[Value], label: &str) -> Result<f64> {
        match self.predict(row)? {
            Prediction::Distribution(p) => Ok(self
                .labels
                .iter()
                .position(|l| l == label)
                .map_or(0.0, |i| p[i])),
            Prediction::Value(_) => Err(Error::Contract("regression tree has no classes".into())),
        }
    }

    /// Most probable label (lowest label index on ties).
    pub fn predict_label(&self, row: &[Value]) -> Result<&str> {
        match self.predict(row)? {
            Prediction::Distribution(p) => {
                let mut best = 0;
                for (i, &v) in p.iter().enumerate() {
                    if v > p[best] {
                        best = i;
                    }
                }
                Ok(&self.labels[best])
            }
            Prediction::Value(_) => Err(Error::Contract("regression tree has no classes".into())),
        }
    }

    fn route<'r>(&self, mut get: impl FnMut(usize) -> Result<Key<'r>>) -> Result<&Prediction> {
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf { prediction, .. } => return Ok(prediction),
                TreeNode::Split { column, rule, left, right, .. } => {
                    let goes_left = match (rule, get(*column)?) {
                        (SplitRule::Below(t), Key::Num(v)) => v < *t,
                        (SplitRule::OneOf(set), Key::Cat(s)) => set.iter().any(|c| c == s),
                        _ => {
                            return Err(Error::Contract(format!(
                                "column {column} has the wrong type for its split"
                            )))
                        }
                    };
                    node = if goes_left { left } else { right };
                }
            }
        }
    }

    /// Regression tree over a numeric matrix; column `j` of a row is
    /// feature `j`.
    pub fn fit_matrix(x: &[Vec<f64>], y: &[f64], params: CartParams) -> Result<Tree> {
        if x.is_empty() {
            return Err(Error::Empty("training rows"));
        }
        if x.len() != y.len() {
            return Err(Error::Contract("feature rows and targets differ in length".into()));
        }
        let width = x[0].len();
        let features = (0..width)
            .map(|j| (j, FeatureData::Num(x.iter().map(|r| r[j]).collect())))
            .collect::<Vec<_>>();
        let target = TargetData::Reg(y.to_vec());
        Ok(grow_tree(&features, &target, params, Vec::new()))
    }
}

enum Key<'a> {
    Num(f64),
    Cat(&'a str),
}

enum FeatureData {
    Num(Vec<f64>),
    Cat(Vec<usize>, Vec<String>),
}

enum TargetData {
    Reg(Vec<f64>),
    Cls(Vec<usize>, usize),
}

/// Fit a tree predicting column `target` from the dataset's feature columns.
/// Numeric targets give a regression tree, categorical ones a classifier.
pub fn cart_fit(data: &Dataset, target: usize, params: CartParams) -> Result<Tree> {
    if data.is_empty() {
        return Err(Error::Empty("dataset"));
    }
    data.check_column(target)?;
    let mut features = Vec::new();
    for col in data.feature_indices().into_iter().filter(|&c| c != target) {
        features.push((
            col,
            match data.columns()[col].kind {
                ColumnKind::Numeric => FeatureData::Num(data.numeric(col)?),
                ColumnKind::Categorical => {
                    let levels = data.categories(col)?;
                    let codes = data
                        .labels(col)?
                        .into_iter()
                        .map(|s| levels.binary_search_by(|l| l.as_str().cmp(s)).expect("level exists"))
                        .collect();
                    FeatureData::Cat(codes, levels)
                }
            },
        ));
    }
    let (target, labels) = match data.columns()[target].kind {
        ColumnKind::Numeric => (TargetData::Reg(data.numeric(target)?), Vec::new()),
        ColumnKind::Categorical => {
            let labels = data.categories(target)?;
            let codes = data
                .labels(target)?
                .into_iter()
                .map(|s| labels.binary_search_by(|l| l.as_str().cmp(s)).expect("label exists"))
                .collect();
            (TargetData::Cls(codes, labels.len()), labels)
        }
    };
    Ok(grow_tree(&features, &target, params, labels))
}

/// Leaf payload of the tree for `row`.
pub fn cart_predict<'t>(tree: &'t Tree, row: &[Value]) -> Result<&'t Prediction> {
    tree.predict(row)
}

fn grow_tree(
    features: &[(usize, FeatureData)],
    target: &TargetData,
    params: CartParams,
    labels: Vec<String>,
) -> Tree {
    let n = match target {
        TargetData::Reg(y) => y.len(),
        TargetData::Cls(y, _) => y.len(),
    };
    let params = CartParams {
        min_leaf: params.min_leaf.max(1),
        ..params
    };
    let root = grow(features, target, (0..n).collect(), 0, params);
    Tree { root, labels }
}

struct Candidate {
    feature: usize,
    rule: SplitRule,
    gain: f64,
    left: Vec<usize>,
    right: Vec<usize>,
}

fn grow(
    features: &[(usize, FeatureData)],
    target: &TargetData,
    rows: Vec<usize>,
    depth: usize,
    params: CartParams,
) -> TreeNode {
    let size = rows.len();
    let leaf = || TreeNode::Leaf {
        prediction: leaf_prediction(target, &rows),
        size,
    };
    if params.max_depth.is_some_and(|m| depth >= m) || size < 2 * params.min_leaf || is_pure(target, &rows) {
        return leaf();
    }
    let parent = impurity(target, &rows);
    let mut best: Option<Candidate> = None;
    for (fi, (_, data)) in features.iter().enumerate() {
        let found = match data {
            FeatureData::Num(values) => best_numeric_split(values, target, &rows, params.min_leaf, parent),
            FeatureData::Cat(codes, levels) => {
                best_categorical_split(codes, levels, target, &rows, params.min_leaf, parent)
            }
        };
        if let Some(mut c) = found {
            if best.as_ref().is_none_or(|b| c.gain > b.gain) {
                c.feature = fi;
                best = Some(c);
            }
        }
    }
    match best {
        Some(c) if c.gain > 1e-12 * parent => TreeNode::Split {
            column: features[c.feature].0,
            rule: c.rule,
            gain: c.gain,
            size,
            left: Box::new(grow(features, target, c.left, depth + 1, params)),
            right: Box::new(grow(features, target, c.right, depth + 1, params)),
        },
        _ => leaf(),
    }
}

fn is_pure(target: &TargetData, rows: &[usize]) -> bool {
    match target {
        TargetData::Reg(y) => rows.iter().all(|&i| y[i] == y[rows[0]]),
        TargetData::Cls(y, _) => rows.iter().all(|&i| y[i] == y[rows[0]]),
    }
}

fn leaf_prediction(target: &TargetData, rows: &[usize]) -> Prediction {
    match target {
        TargetData::Reg(y) => Prediction::Value(rows.iter().map(|&i| y[i]).sum::<f64>() / rows.len() as f64),
        TargetData::Cls(y, k) => {
            let mut counts = vec![0.0; *k];
            for &i in rows {
                counts[y[i]] += 1.0;
            }
            let n = rows.len() as f64;
            Prediction::Distribution(counts.into_iter().map(|c| c / n).collect())
        }
    }
}

/// Summed squared error (regression) or `n * gini` (classification).
fn impurity(target: &TargetData, rows: &[usize]) -> f64 {
    match target {
        TargetData::Reg(y) => {
            let mean = rows.iter().map(|&i| y[i]).sum::<f64>() / rows.len() as f64;
            rows.iter().map(|&i| (y[i] - mean).powi(2)).sum()
        }
        TargetData::Cls(y, k) => {
            let mut counts = vec![0.0; *k];
            for &i in rows {
                counts[y[i]] += 1.0;
            }
            gini_mass(&counts, rows.len() as f64)
        }
    }
}

fn gini_mass(counts: &[f64], n: f64) -> f64 {
    if n == 0.0 {
        return 0.0;
    }
    n - counts.iter().map(|c| c * c).sum::<f64>() / n
}

/// Running statistics of the left side of a sweep.
enum Sweep {
    Reg { shift: f64, s: f64, q: f64, total_s: f64, total_q: f64 },
    Cls { left: Vec<f64>, total: Vec<f64> },
}

impl Sweep {
    fn new(target: &TargetData, rows: &[usize]) -> Sweep {
        match target {
            TargetData::Reg(y) => {
                let shift = rows.iter().map(|&i| y[i]).sum::<f64>() / rows.len() as f64;
                let (mut s, mut q) = (0.0, 0.0);
                for &i in rows {
                    let v = y[i] - shift;
                    s += v;
                    q += v * v;
                }
                Sweep::Reg { shift, s: 0.0, q: 0.0, total_s: s, total_q: q }
            }
            TargetData::Cls(y, k) => {
                let mut total = vec![0.0; *k];
                for &i in rows {
                    total[y[i]] += 1.0;
                }
                Sweep::Cls { left: vec![0.0; *k], total }
            }
        }
    }

    fn push(&mut self, target: &TargetData, i: usize) {
        match (self, target) {
            (Sweep::Reg { shift, s, q, .. }, TargetData::Reg(y)) => {
                let v = y[i] - *shift;
                *s += v;
                *q += v * v;
            }
            (Sweep::Cls { left, .. }, TargetData::Cls(y, _)) => left[y[i]] += 1.0,
            _ => unreachable!("sweep built from the same target"),
        }
    }

    /// Impurity of (left, right) when `nl` of `n` rows are on the left.
    fn children(&self, nl: usize, n: usize) -> f64 {
        let (nl, nr) = (nl as f64, (n - nl) as f64);
        match self {
            Sweep::Reg { s, q, total_s, total_q, .. } => {
                let left = q - s * s / nl;
                let (rs, rq) = (total_s - s, total_q - q);
                let right = rq - rs * rs / nr;
                left.max(0.0) + right.max(0.0)
            }
            Sweep::Cls { left, total } => {
                let right: Vec<f64> = total.iter().zip(left).map(|(t, l)| t - l).collect();
                gini_mass(left, nl) + gini_mass(&right, nr)
            }
        }
    }
}

fn best_numeric_split(
    values: &[f64],
    target: &TargetData,
    rows: &[usize],
    min_leaf: usize,
    parent: f64,
) -> Option<Candidate> {
    let mut order = rows.to_vec();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let n = order.len();
    let mut sweep = Sweep::new(target, rows);
    let mut best: Option<(usize, f64)> = None;
    for k in 1..n {
        sweep.push(target, order[k - 1]);
        if k < min_leaf || n - k < min_leaf {
            continue;
        }
        if values[order[k - 1]] == values[order[k]] {
            continue;
        }
        let gain = parent - sweep.children(k, n);
        if best.is_none_or(|(_, g)| gain > g) {
            best = Some((k, gain));
        }
    }
    let (k, gain) = best?;
    let (lo, hi) = (values[order[k - 1]], values[order[k]]);
    let mut threshold = lo + (hi - lo) / 2.0;
    if threshold <= lo {
        threshold = hi;
    }
    Some(Candidate {
        feature: 0,
        rule: SplitRule::Below(threshold),
        gain,
        left: order[..k].to_vec(),
        right: order[k..].to_vec(),
    })
}

fn best_categorical_split(
    codes: &[usize],
    levels: &[String],
    target: &TargetData,
    rows: &[usize],
    min_leaf: usize,
    parent: f64,
) -> Option<Candidate> {
    let mut by_level: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &i in rows {
        by_level.entry(codes[i]).or_default().push(i);
    }
    if by_level.len() < 2 {
        return None;
    }
    // Order levels by mean target (regression) or by the share of the node's
    // majority class, then sweep prefixes of that order.
    let key = |members: &[usize]| -> f64 {
        match target {
            TargetData::Reg(y) => members.iter().map(|&i| y[i]).sum::<f64>() / members.len() as f64,
            TargetData::Cls(y, k) => {
                let mut counts = vec![0usize; *k];
                for &i in rows {
                    counts[y[i]] += 1;
                }
                let major = (0..*k).max_by_key(|&c| (counts[c], std::cmp::Reverse(c))).unwrap_or(0);
                members.iter().filter(|&&i| y[i] == major).count() as f64 / members.len() as f64
            }
        }
    };
    let mut ordered: Vec<(usize, Vec<usize>, f64)> = by_level
        .into_iter()
        .map(|(lvl, members)| {
            let k = key(&members);
            (lvl, members, k)
        })
        .collect();
    ordered.sort_by(|a, b| a.2.partial_cmp(&b.2).unwrap_or(Ordering::Equal).then(a.0.cmp(&b.0)));

    let n = rows.len();
    let mut sweep = Sweep::new(target, rows);
    let mut nl = 0;
    let mut best: Option<(usize, f64)> = None;
    for (j, (_, members, _)) in ordered.iter().enumerate().take(ordered.len() - 1) {
        for &i in members {
            sweep.push(target, i);
        }
        nl += members.len();
        if nl < min_leaf || n - nl < min_leaf {
            continue;
        }
        let gain = parent - sweep.children(nl, n);
        if best.is_none_or(|(_, g)| gain > g) {
            best = Some((j, gain));
        }
    }
    let (j, gain) = best?;
    let left_levels: Vec<String> = ordered[..=j].iter().map(|(l, _, _)| levels[*l].clone()).collect();
    let left: Vec<usize> = ordered[..=j].iter().flat_map(|(_, m, _)| m.iter().copied()).collect();
    let right: Vec<usize> = ordered[j + 1..].iter().flat_map(|(_, m, _)| m.iter().copied()).collect();
    Some(Candidate {
        feature: 0,
        rule: SplitRule::OneOf(left_levels),
        gain,
        left,
        right,
    })
}
