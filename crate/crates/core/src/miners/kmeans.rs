use super::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::Seed;
use rand::seq::SliceRandom;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KMeansOptions {
    pub max_iter: usize,
    /// Stop once no centroid moves further than this (Euclidean).
    pub tol: f64,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        KMeansOptions {
            max_iter: 100,
            tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KMeans {
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Inertia after each assignment step.
    pub inertia_history: Vec<f64>,
}

impl KMeans {
    pub fn inertia(&self) -> f64 {
        self.inertia_history.last().copied().unwrap_or(0.0)
    }

    /// Index of the centroid nearest `point` (lowest index on ties).
    pub fn nearest(&self, point: &[f64]) -> usize {
        nearest(&self.centroids, point).0
    }
}

/// Lloyd's k-means over the dataset's feature columns, categoricals one-hot
/// expanded.
pub fn kmeans(data: &Dataset, k: usize, seed: Seed, opts: KMeansOptions) -> Result<KMeans> {
    kmeans_points(&data.numeric_matrix()?, k, seed, opts)
}

/// Lloyd's k-means over raw points. Initial centroids are `k` distinct
/// points drawn by a seeded shuffle.
pub fn kmeans_points(points: &[Vec<f64>], k: usize, seed: Seed, opts: KMeansOptions) -> Result<KMeans> {
    if k == 0 {
        return Err(Error::invalid("k must be >= 1"));
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.shuffle(&mut seed.rng());
    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(k);
    for &i in &order {
        if centroids.len() == k {
            break;
        }
        if !centroids.iter().any(|c| c == &points[i]) {
            centroids.push(points[i].clone());
        }
    }
    if centroids.len() < k {
        return Err(Error::invalid(format!(
            "k = {k} exceeds the {} distinct rows",
            centroids.len()
        )));
    }

    let dim = points[0].len();
    let mut assignments = vec![0; points.len()];
    let mut inertia_history = Vec::new();
    for _ in 0..opts.max_iter.max(1) {
        let mut inertia = 0.0;
        for (a, p) in assignments.iter_mut().zip(points) {
            let (c, d2) = nearest(&centroids, p);
            *a = c;
            inertia += d2;
        }
        inertia_history.push(inertia);

        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (&a, p) in assignments.iter().zip(points) {
            counts[a] += 1;
            for (s, v) in sums[a].iter_mut().zip(p) {
                *s += v;
            }
        }
        let mut shift: f64 = 0.0;
        for c in 0..k {
            // An empty cluster keeps its centroid.
            if counts[c] == 0 {
                continue;
            }
            let updated: Vec<f64> = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            shift = shift.max(sq_dist(&updated, &centroids[c]).sqrt());
            centroids[c] = updated;
        }
        if shift < opts.tol {
            break;
        }
    }
    // Final assignment against the settled centroids.
    let mut inertia = 0.0;
    for (a, p) in assignments.iter_mut().zip(points) {
        let (c, d2) = nearest(&centroids, p);
        *a = c;
        inertia += d2;
    }
    inertia_history.push(inertia);
    Ok(KMeans {
        assignments,
        centroids,
        inertia_history,
    })
}

fn nearest(centroids: &[Vec<f64>], p: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, c) in centroids.iter().enumerate() {
        let d = sq_dist(c, p);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn k_one_gives_column_means() {
        let pts = vec![vec![0.0, 1.0], vec![2.0, 3.0], vec![4.0, 8.0]];
        let km = kmeans_points(&pts, 1, Seed(0), KMeansOptions::default()).unwrap();
        assert_eq!(km.centroids, vec![vec![2.0, 4.0]]);
        assert_eq!(km.assignments, vec![0, 0, 0]);
    }

    #[test]
    fn k_n_distinct_has_zero_inertia() {
        let pts: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let km = kmeans_points(&pts, 6, Seed(3), KMeansOptions::default()).unwrap();
        assert_eq!(km.inertia(), 0.0);
    }

    #[test]
    fn too_many_clusters() {
        let pts = vec![vec![1.0], vec![1.0], vec![2.0]];
        assert!(kmeans_points(&pts, 3, Seed(0), KMeansOptions::default()).is_err());
        assert!(kmeans_points(&pts, 0, Seed(0), KMeansOptions::default()).is_err());
    }

    #[test]
    fn separated_blobs_recovered() {
        let mut rng = Seed(11).rng();
        let mut pts = Vec::new();
        let mut truth = Vec::new();
        for (b, center) in [(0.0, 0.0), (10.0, 10.0)].iter().enumerate() {
            for _ in 0..30 {
                let r: f64 = rng.gen_range(0.0..1.0);
                let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                pts.push(vec![center.0 + r * t.cos(), center.1 + r * t.sin()]);
                truth.push(b);
            }
        }
        for s in 0..5 {
            let km = kmeans_points(&pts, 2, Seed(s), KMeansOptions::default()).unwrap();
            let flip = km.assignments[0] != truth[0];
            for (a, t) in km.assignments.iter().zip(&truth) {
                assert_eq!(*a != *t, flip);
            }
            assert!(km.inertia_history.windows(2).all(|w| w[1] <= w[0] + 1e-9));
        }
    }
}
