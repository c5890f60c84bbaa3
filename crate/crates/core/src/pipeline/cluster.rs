use crate::error::{Error, Result};
use crate::miners::{kmeans_points, ColumnKind, Dataset, KMeansOptions};
use crate::optimizers::DeParams;
use crate::rng::Seed;
use crate::tuning::{de_tune_by, tuning_cv_seed, Target, TuneReport, TuningSpec};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterRun {
    /// Cluster id after merging.
    pub cluster: usize,
    /// Dataset rows in this cluster, ascending.
    pub rows: Vec<usize>,
    pub tune: TuneReport,
    /// Fitness calls made for this cluster.
    pub evals: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub from: usize,
    pub into: usize,
    pub rows: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub k: usize,
    pub clusters: Vec<ClusterRun>,
    pub merges: Vec<Merge>,
    /// Index into `clusters` of the best tuned fitness.
    pub pooled_best: usize,
    /// Row-weighted mean of the per-cluster tuned fitness.
    pub pooled_fitness: f64,
    pub total_evals: usize,
}

/// Numeric features min-max scaled to `[0, 1]`.
fn scaled_features(data: &Dataset) -> Result<Vec<Vec<f64>>> {
    let cols: Vec<usize> = data
        .feature_indices()
        .into_iter()
        .filter(|&c| data.columns()[c].kind == ColumnKind::Numeric)
        .collect();
    if cols.is_empty() {
        return Err(Error::invalid("clustering needs numeric features"));
    }
    let mut points = vec![Vec::with_capacity(cols.len()); data.len()];
    for c in cols {
        let v = data.numeric(c)?;
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = if hi > lo { hi - lo } else { 1.0 };
        for (p, x) in points.iter_mut().zip(v) {
            p.push((x - lo) / span);
        }
    }
    Ok(points)
}

/// Whether `rows` can be cross-validated with `folds` stratified folds.
fn viable(data: &Dataset, rows: &[usize], folds: usize) -> bool {
    let sub = data.subset(rows);
    if sub.len() < folds {
        return false;
    }
    match Target::of(&sub) {
        Ok(Target::Class { column, .. }) => {
            let labels = sub.labels(column).unwrap_or_default();
            let cats = sub.categories(column).unwrap_or_default();
            cats.len() == 2 && cats.iter().all(|c| labels.iter().filter(|l| **l == c).count() >= folds)
        }
        Ok(Target::Numeric { .. }) => true,
        Err(_) => false,
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// k-means over the scaled numeric features (seeded with `seed`), then DE
/// tuning inside each cluster with `seed.derive(c + 1)`. A cluster too small
/// for stratified cross-validation is merged into the cluster with the
/// nearest centroid, smallest first.
pub fn cluster_then_optimize(
    data: &Dataset,
    k: usize,
    spec: &TuningSpec,
    de: &DeParams,
    seed: Seed,
) -> Result<ClusterReport> {
    if k == 0 {
        return Err(Error::invalid("k must be >= 1"));
    }
    let points = scaled_features(data)?;
    let km = kmeans_points(&points, k, seed, KMeansOptions::default())?;
    let mut groups: Vec<Option<Vec<usize>>> = vec![Some(Vec::new()); k];
    for (i, &c) in km.assignments.iter().enumerate() {
        groups[c].as_mut().expect("live group").push(i);
    }
    let mut merges = Vec::new();
    loop {
        let live: Vec<usize> = (0..k).filter(|&c| groups[c].is_some()).collect();
        let weak = live
            .iter()
            .copied()
            .filter(|&c| !viable(data, groups[c].as_ref().expect("live"), spec.folds))
            .min_by_key(|&c| (groups[c].as_ref().expect("live").len(), c));
        let Some(from) = weak else { break };
        if live.len() == 1 {
            return Err(Error::invalid(format!(
                "dataset cannot support {}-fold cross-validation",
                spec.folds
            )));
        }
        let into = live
            .iter()
            .copied()
            .filter(|&c| c != from)
            .min_by(|&a, &b| {
                dist2(&km.centroids[from], &km.centroids[a])
                    .total_cmp(&dist2(&km.centroids[from], &km.centroids[b]))
                    .then(a.cmp(&b))
            })
            .expect("another live cluster");
        let moved = groups[from].take().expect("live");
        merges.push(Merge {
            from,
            into,
            rows: moved.len(),
        });
        let target = groups[into].as_mut().expect("live");
        target.extend(moved);
        target.sort_unstable();
    }

    let mut clusters = Vec::new();
    for (c, rows) in groups.into_iter().enumerate() {
        let Some(rows) = rows else { continue };
        let sub = data.subset(&rows);
        let cluster_seed = seed.derive(c as u64 + 1);
        let cv_seed = tuning_cv_seed(cluster_seed);
        let mut calls = 0usize;
        let mut tune = de_tune_by(&spec.space, spec.metric.direction(), de, cluster_seed, |p| {
            calls += 1;
            spec.fitness(p, &sub, cv_seed)
        })?;
        tune.cv_seed = Some(cv_seed.0);
        debug_assert_eq!(calls, tune.evals());
        clusters.push(ClusterRun {
            cluster: c,
            rows,
            tune,
            evals: calls,
        });
    }

    let dir = spec.metric.direction();
    let mut pooled_best = 0;
    for (i, run) in clusters.iter().enumerate() {
        if dir.better(run.tune.best_fitness, clusters[pooled_best].tune.best_fitness) {
            pooled_best = i;
        }
    }
    let pooled_fitness = clusters
        .iter()
        .map(|r| r.tune.best_fitness * r.rows.len() as f64)
        .sum::<f64>()
        / data.len() as f64;
    let total_evals = clusters.iter().map(|r| r.evals).sum();
    Ok(ClusterReport {
        k,
        clusters,
        merges,
        pooled_best,
        pooled_fitness,
        total_evals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::miners::imbalanced_fixture;
    use crate::tuning::{de_tune, Learner, Metric};

    fn small_de() -> DeParams {
        DeParams { np: 4, f: 0.75, cr: 0.3, generations: 1 }
    }

    #[test]
    fn one_cluster_matches_plain_tuning() {
        let data = imbalanced_fixture(8, 4, Seed(2));
        let spec = TuningSpec::new(Learner::Cart, Metric::Recall);
        let r = cluster_then_optimize(&data, 1, &spec, &small_de(), Seed(11)).unwrap();
        let plain = de_tune(&spec, &data, &small_de(), Seed(11).derive(1)).unwrap();
        assert_eq!(r.clusters.len(), 1);
        assert_eq!(r.clusters[0].tune, plain);
        assert_eq!(r.total_evals, plain.evals());
    }

    #[test]
    fn clusters_partition_rows_and_evals_add_up() {
        let data = imbalanced_fixture(15, 4, Seed(3));
        let spec = TuningSpec::new(Learner::Cart, Metric::Auc);
        let r = cluster_then_optimize(&data, 3, &spec, &small_de(), Seed(5)).unwrap();
        let mut all: Vec<usize> = r.clusters.iter().flat_map(|c| c.rows.clone()).collect();
        all.sort_unstable();
        assert_eq!(all, (0..data.len()).collect::<Vec<_>>());
        assert_eq!(r.total_evals, r.clusters.iter().map(|c| c.tune.evals()).sum::<usize>());
        assert_eq!(r.clusters.len() + r.merges.len(), 3);
    }
}
