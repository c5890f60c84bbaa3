use super::metrics::{classification_metrics, mse, Metric, MetricsReport};
use super::space::{Param, ParamDomain, ParamSpace, Params};
use crate::error::{Error, Result};
use crate::miners::{cart_fit, minority_majority, smote_rebalance, CartParams, Dataset, SmoteParams};
use crate::rng::Seed;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Learners the tuners know how to configure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Learner {
    Cart,
    /// SMOTE on the training rows, then CART.
    SmoteCart,
}

impl Learner {
    pub fn name(self) -> &'static str {
        match self {
            Learner::Cart => "cart",
            Learner::SmoteCart => "smote-cart",
        }
    }

    /// Tunable parameters with their defaults.
    pub fn space(self) -> ParamSpace {
        let cart_default = CartParams::default();
        let mut params = vec![
            Param::new("max_depth", ParamDomain::Integer { lo: 1, hi: 20 }, cart_default.max_depth.unwrap_or(20) as f64),
            Param::new("min_leaf", ParamDomain::Integer { lo: 1, hi: 20 }, cart_default.min_leaf as f64),
        ];
        if self == Learner::SmoteCart {
            let d = SmoteParams::default();
            params.push(Param::new("k", ParamDomain::Integer { lo: 1, hi: 20 }, d.k as f64));
            params.push(Param::new("m", ParamDomain::Real { lo: 0.5, hi: 4.0 }, d.m));
            params.push(Param::new("r", ParamDomain::Real { lo: 0.1, hi: 5.0 }, d.r));
        }
        ParamSpace::new(params).expect("built-in space is valid")
    }

    pub fn defaults(self) -> Params {
        self.space().defaults()
    }

    fn cart_params(params: &Params) -> CartParams {
        let d = CartParams::default();
        CartParams {
            max_depth: params.get("max_depth").map(|&v| v.round().max(1.0) as usize).or(d.max_depth),
            min_leaf: params.get("min_leaf").map_or(d.min_leaf, |&v| v.round().max(1.0) as usize),
        }
    }

    fn smote_params(params: &Params) -> SmoteParams {
        let d = SmoteParams::default();
        SmoteParams {
            k: params.get("k").map_or(d.k, |&v| v.round().max(1.0) as usize),
            m: params.get("m").copied().unwrap_or(d.m),
            r: params.get("r").copied().unwrap_or(d.r),
            majority_ratio: d.majority_ratio,
        }
    }
}

impl fmt::Display for Learner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Learner {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "cart" => Ok(Learner::Cart),
            "smote-cart" | "smote+cart" | "smote" => Ok(Learner::SmoteCart),
            other => Err(Error::invalid(format!("unknown learner `{other}`"))),
        }
    }
}

/// What a learner predicts in `data`: the class column, or else the first
/// goal column as a regression target.
#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    Class { column: usize, positive: String },
    Numeric { column: usize },
}

impl Target {
    pub fn of(data: &Dataset) -> Result<Target> {
        if let Some(column) = data.class_index() {
            let (positive, _) = minority_majority(data, column)?;
            return Ok(Target::Class { column, positive });
        }
        match data.goal_indices().first() {
            Some(&column) => Ok(Target::Numeric { column }),
            None => Err(Error::invalid("dataset has neither a class nor a goal column")),
        }
    }

    pub fn column(&self) -> usize {
        match self {
            Target::Class { column, .. } | Target::Numeric { column } => *column,
        }
    }
}

/// Fit on `train`, score on `test`.
pub fn fit_and_score(
    learner: Learner,
    params: &Params,
    train: &Dataset,
    test: &Dataset,
    target: &Target,
    seed: Seed,
) -> Result<MetricsReport> {
    let cart = Learner::cart_params(params);
    match target {
        Target::Class { column, positive } => {
            let train = match learner {
                Learner::Cart => train.clone(),
                Learner::SmoteCart => smote_rebalance(train, *column, Learner::smote_params(params), seed)?,
            };
            let tree = cart_fit(&train, *column, cart)?;
            let (mut predicted, mut scores, mut actual) = (Vec::new(), Vec::new(), Vec::new());
            for row in test.rows() {
                predicted.push(tree.predict_label(row)? == positive);
                scores.push(tree.class_probability(row, positive)?);
                actual.push(row[*column].as_cat() == Some(positive.as_str()));
            }
            classification_metrics(&predicted, &scores, &actual)
        }
        Target::Numeric { column } => {
            if learner == Learner::SmoteCart {
                return Err(Error::invalid("SMOTE needs a class column"));
            }
            let tree = cart_fit(train, *column, cart)?;
            let mut predicted = Vec::new();
            for row in test.rows() {
                predicted.push(tree.predict(row).and_then(|p| match p {
                    crate::miners::Prediction::Value(v) => Ok(*v),
                    _ => Err(Error::Contract("expected a regression tree".into())),
                })?);
            }
            Ok(MetricsReport {
                mse: Some(mse(&predicted, &test.numeric(*column)?)?),
                ..MetricsReport::default()
            })
        }
    }
}

/// Test-row indices of each fold, stratified by class when there is one.
/// Each class's rows are shuffled and dealt round-robin, continuing the
/// deal across classes so fold sizes differ by at most one.
pub fn stratified_folds(data: &Dataset, target: &Target, folds: usize, seed: Seed) -> Result<Vec<Vec<usize>>> {
    if folds < 2 {
        return Err(Error::invalid(format!("need at least 2 folds, got {folds}")));
    }
    let mut rng = seed.rng();
    let groups: Vec<Vec<usize>> = match target {
        Target::Class { column, .. } => {
            let labels = data.labels(*column)?;
            data.categories(*column)?
                .iter()
                .map(|c| (0..data.len()).filter(|&i| labels[i] == c).collect())
                .collect()
        }
        Target::Numeric { .. } => vec![(0..data.len()).collect()],
    };
    if let Some(small) = groups.iter().map(Vec::len).min() {
        if small < folds {
            return Err(Error::invalid(format!("{folds} folds exceed a class with {small} rows")));
        }
    }
    let mut out = vec![Vec::new(); folds];
    let mut deal = 0;
    for mut g in groups {
        g.shuffle(&mut rng);
        for i in g {
            out[deal % folds].push(i);
            deal += 1;
        }
    }
    for f in &mut out {
        f.sort_unstable();
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub repeat: usize,
    pub fold: usize,
    pub test_indices: Vec<usize>,
    pub train_rows: usize,
    pub metrics: MetricsReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub folds: Vec<FoldResult>,
}

impl CvReport {
    pub fn values(&self, metric: Metric) -> Vec<Option<f64>> {
        self.folds.iter().map(|f| f.metrics.get(metric)).collect()
    }

    /// Mean over folds; absent values count as the metric's worst value.
    pub fn fitness(&self, metric: Metric) -> f64 {
        let n = self.folds.len().max(1) as f64;
        self.values(metric).iter().map(|v| v.unwrap_or(metric.worst())).sum::<f64>() / n
    }
}

/// `repeats` rounds of stratified `folds`-fold cross-validation. Repeat `i`
/// shuffles with `seed.derive(i)`. Pre-processing sees training rows only.
pub fn cross_validate(
    learner: Learner,
    params: &Params,
    data: &Dataset,
    folds: usize,
    repeats: usize,
    seed: Seed,
) -> Result<CvReport> {
    if repeats == 0 {
        return Err(Error::invalid("repeats must be >= 1"));
    }
    let target = Target::of(data)?;
    let mut out = Vec::with_capacity(folds * repeats);
    for repeat in 0..repeats {
        let split = stratified_folds(data, &target, folds, seed.derive(repeat as u64))?;
        for (fold, test_indices) in split.into_iter().enumerate() {
            let mut in_test = vec![false; data.len()];
            for &i in &test_indices {
                in_test[i] = true;
            }
            let train_idx: Vec<usize> = (0..data.len()).filter(|&i| !in_test[i]).collect();
            let train = data.subset(&train_idx);
            let test = data.subset(&test_indices);
            let fold_seed = seed.salted((repeat * folds + fold) as u64 + 1);
            let metrics = fit_and_score(learner, params, &train, &test, &target, fold_seed)?;
            out.push(FoldResult {
                repeat,
                fold,
                test_indices,
                train_rows: train.len(),
                metrics,
            });
        }
    }
    Ok(CvReport { folds: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::miners::imbalanced_fixture;

    #[test]
    fn folds_partition_and_stratify() {
        let data = imbalanced_fixture(12, 5, Seed(4));
        let target = Target::of(&data).unwrap();
        assert_eq!(target, Target::Class { column: 3, positive: "yes".into() });
        let folds = stratified_folds(&data, &target, 4, Seed(9)).unwrap();
        let mut all: Vec<usize> = folds.concat();
        all.sort_unstable();
        assert_eq!(all, (0..data.len()).collect::<Vec<_>>());
        let labels = data.labels(3).unwrap();
        for f in &folds {
            assert_eq!(f.iter().filter(|&&i| labels[i] == "yes").count(), 3);
        }
        assert!(stratified_folds(&data, &target, 13, Seed(9)).is_err());
        assert!(stratified_folds(&data, &target, 1, Seed(9)).is_err());
    }

    #[test]
    fn cv_is_deterministic_and_bounded() {
        let data = imbalanced_fixture(10, 4, Seed(1));
        let p = Learner::SmoteCart.defaults();
        let a = cross_validate(Learner::SmoteCart, &p, &data, 3, 2, Seed(5)).unwrap();
        let b = cross_validate(Learner::SmoteCart, &p, &data, 3, 2, Seed(5)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.folds.len(), 6);
        for f in &a.folds {
            assert_eq!(f.train_rows + f.test_indices.len(), data.len());
            for m in [Metric::Recall, Metric::Precision, Metric::FalseAlarm, Metric::Auc] {
                if let Some(v) = f.metrics.get(m) {
                    assert!((0.0..=1.0).contains(&v));
                }
            }
        }
    }
}
