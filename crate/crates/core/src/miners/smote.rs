//! SMOTE-style class rebalancing: synthesize minority rows by interpolating
//! towards near minority neighbours, optionally discarding majority rows.

use super::dataset::{Dataset, Value};
use crate::error::{Error, Result};
use crate::rng::Seed;
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoteParams {
    /// Nearest minority neighbours considered per parent.
    pub k: usize,
    /// Minority target as a multiple of the original minority count. Values
    /// at or below 1 synthesize nothing.
    pub m: f64,
    /// Minkowski power of the neighbour distance.
    pub r: f64,
    /// When set, the majority class is subsampled to at most
    /// `ratio * minority` rows.
    pub majority_ratio: Option<f64>,
}

impl Default for SmoteParams {
    fn default() -> Self {
        SmoteParams {
            k: 5,
            m: 2.0,
            r: 2.0,
            majority_ratio: Some(1.0),
        }
    }
}

/// Provenance of one synthetic row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyntheticRow {
    /// Index in the rebalanced dataset.
    pub row: usize,
    /// Parent row indices in the input dataset.
    pub parents: (usize, usize),
    pub gap: f64,
}

/// The minority label of a binary class column (the later label in sorted
/// order on a tie) and the majority label.
pub fn minority_majority(data: &Dataset, class: usize) -> Result<(String, String)> {
    let labels = data.categories(class)?;
    if labels.len() != 2 {
        return Err(Error::invalid(format!(
            "class column must be binary, found {} labels",
            labels.len()
        )));
    }
    let values = data.labels(class)?;
    let first = values.iter().filter(|&&v| v == labels[0]).count();
    let second = values.len() - first;
    if first < second {
        Ok((labels[0].clone(), labels[1].clone()))
    } else {
        Ok((labels[1].clone(), labels[0].clone()))
    }
}

pub fn smote_rebalance(data: &Dataset, class: usize, params: SmoteParams, seed: Seed) -> Result<Dataset> {
    smote_rebalance_traced(data, class, params, seed).map(|(d, _)| d)
}

/// Rebalanced dataset plus the parents of every synthetic row. Kept input
/// rows come first in input order, synthetic rows after them.
pub fn smote_rebalance_traced(
    data: &Dataset,
    class: usize,
    params: SmoteParams,
    seed: Seed,
) -> Result<(Dataset, Vec<SyntheticRow>)> {
    if params.r.is_nan() || params.r <= 0.0 {
        return Err(Error::invalid("Minkowski power r must be > 0"));
    }
    if params.m.is_nan() || params.m <= 0.0 {
        return Err(Error::invalid("minority multiplier m must be > 0"));
    }
    let (minority_label, _) = minority_majority(data, class)?;
    let labels = data.labels(class)?;
    let minority: Vec<usize> = (0..data.len()).filter(|&i| labels[i] == minority_label).collect();
    let majority: Vec<usize> = (0..data.len()).filter(|&i| labels[i] != minority_label).collect();
    let mut rng = seed.rng();

    let target_minority = ((params.m * minority.len() as f64).round() as usize).max(minority.len());
    let n_synthetic = target_minority - minority.len();

    let keep_majority: Vec<usize> = match params.majority_ratio {
        Some(ratio) => {
            let cap = (ratio * target_minority as f64).round() as usize;
            if majority.len() > cap {
                let mut picked: Vec<usize> = sample(&mut rng, majority.len(), cap)
                    .into_iter()
                    .map(|i| majority[i])
                    .collect();
                picked.sort_unstable();
                picked
            } else {
                majority.clone()
            }
        }
        None => majority.clone(),
    };

    let mut kept: Vec<usize> = minority.iter().chain(&keep_majority).copied().collect();
    kept.sort_unstable();
    let mut out = data.subset(&kept);

    let k = params.k.min(minority.len() - 1);
    let neighbours: Vec<Vec<usize>> = if k == 0 || n_synthetic == 0 {
        vec![Vec::new(); minority.len()]
    } else {
        minority
            .iter()
            .map(|&i| {
                let mut d: Vec<(f64, usize)> = minority
                    .iter()
                    .filter(|&&j| j != i)
                    .map(|&j| (minkowski(&data.rows()[i], &data.rows()[j], class, params.r), j))
                    .collect();
                d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                d.into_iter().take(k).map(|(_, j)| j).collect()
            })
            .collect()
    };

    let mut trace = Vec::with_capacity(n_synthetic);
    for _ in 0..n_synthetic {
        let pi = rng.gen_range(0..minority.len());
        let p = minority[pi];
        let (q, gap) = if neighbours[pi].is_empty() {
            (p, 0.0)
        } else {
            let q = neighbours[pi][rng.gen_range(0..neighbours[pi].len())];
            (q, rng.gen::<f64>())
        };
        let row = interpolate(&data.rows()[p], &data.rows()[q], gap);
        trace.push(SyntheticRow {
            row: out.len(),
            parents: (p, q),
            gap,
        });
        out.push_row(row)?;
    }
    Ok((out, trace))
}

fn minkowski(a: &[Value], b: &[Value], skip: usize, r: f64) -> f64 {
    a.iter()
        .zip(b)
        .enumerate()
        .filter(|(i, _)| *i != skip)
        .map(|(_, pair)| match pair {
            (Value::Num(x), Value::Num(y)) => (x - y).abs().powf(r),
            (Value::Cat(x), Value::Cat(y)) => f64::from(u8::from(x != y)),
            _ => 1.0,
        })
        .sum()
}

fn interpolate(p: &[Value], q: &[Value], gap: f64) -> Vec<Value> {
    p.iter()
        .zip(q)
        .map(|pair| match pair {
            (Value::Num(a), Value::Num(b)) => {
                let v = a + gap * (b - a);
                Value::Num(v.clamp(a.min(*b), a.max(*b)))
            }
            (a, b) => {
                if gap < 0.5 {
                    a.clone()
                } else {
                    b.clone()
                }
            }
        })
        .collect()
}
