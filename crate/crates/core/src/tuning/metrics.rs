use crate::error::{Error, Result};
use crate::model::Direction;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Learner performance. Ratios with a zero denominator are absent.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub recall: Option<f64>,
    pub precision: Option<f64>,
    pub false_alarm: Option<f64>,
    pub auc: Option<f64>,
    pub mse: Option<f64>,
}

impl MetricsReport {
    pub fn get(&self, metric: Metric) -> Option<f64> {
        match metric {
            Metric::Recall => self.recall,
            Metric::Precision => self.precision,
            Metric::FalseAlarm => self.false_alarm,
            Metric::Auc => self.auc,
            Metric::Mse => self.mse,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    Recall,
    Precision,
    FalseAlarm,
    Auc,
    Mse,
}

impl Metric {
    pub const ALL: [Metric; 5] = [Metric::Recall, Metric::Precision, Metric::FalseAlarm, Metric::Auc, Metric::Mse];

    pub fn direction(self) -> Direction {
        match self {
            Metric::FalseAlarm | Metric::Mse => Direction::Minimize,
            _ => Direction::Maximize,
        }
    }

    /// Stand-in for an absent value when averaging: the worst the metric can be.
    pub fn worst(self) -> f64 {
        match self {
            Metric::Recall | Metric::Precision | Metric::Auc => 0.0,
            Metric::FalseAlarm => 1.0,
            Metric::Mse => f64::INFINITY,
        }
    }

    pub fn is_regression(self) -> bool {
        self == Metric::Mse
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Recall => "recall",
            Metric::Precision => "precision",
            Metric::FalseAlarm => "false-alarm",
            Metric::Auc => "auc",
            Metric::Mse => "mse",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "recall" | "pd" => Ok(Metric::Recall),
            "precision" | "prec" => Ok(Metric::Precision),
            "false-alarm" | "pf" => Ok(Metric::FalseAlarm),
            "auc" => Ok(Metric::Auc),
            "mse" => Ok(Metric::Mse),
            other => Err(Error::invalid(format!("unknown metric `{other}`"))),
        }
    }
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Confusion-matrix rates and the rank-sum AUC of `scores` (higher means
/// more likely positive).
pub fn classification_metrics(predicted: &[bool], scores: &[f64], actual: &[bool]) -> Result<MetricsReport> {
    if predicted.len() != actual.len() || scores.len() != actual.len() {
        return Err(Error::Contract(format!(
            "length mismatch: {} predictions, {} scores, {} labels",
            predicted.len(),
            scores.len(),
            actual.len()
        )));
    }
    let (mut tp, mut fp, mut fneg, mut tn) = (0, 0, 0, 0);
    for (&p, &a) in predicted.iter().zip(actual) {
        match (p, a) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fneg += 1,
            (false, false) => tn += 1,
        }
    }
    Ok(MetricsReport {
        recall: ratio(tp, tp + fneg),
        precision: ratio(tp, tp + fp),
        false_alarm: ratio(fp, fp + tn),
        auc: auc(scores, actual),
        mse: None,
    })
}

/// Mann-Whitney U / (P * N) with average ranks for ties. Absent when one
/// class is missing.
pub fn auc(scores: &[f64], actual: &[bool]) -> Option<f64> {
    let pos = actual.iter().filter(|&&a| a).count();
    let neg = actual.len() - pos;
    if pos == 0 || neg == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        rank_sum += order[i..=j].iter().filter(|&&k| actual[k]).count() as f64 * avg;
        i = j + 1;
    }
    let u = rank_sum - (pos * (pos + 1)) as f64 / 2.0;
    Some(u / (pos * neg) as f64)
}

pub fn mse(predicted: &[f64], actual: &[f64]) -> Result<f64> {
    if predicted.len() != actual.len() {
        return Err(Error::Contract(format!(
            "length mismatch: {} predictions, {} actuals",
            predicted.len(),
            actual.len()
        )));
    }
    if actual.is_empty() {
        return Err(Error::Empty("mse input"));
    }
    Ok(predicted.iter().zip(actual).map(|(p, a)| (a - p).powi(2)).sum::<f64>() / actual.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn confusion_example() {
        let mut predicted = vec![true; 4];
        let mut actual = vec![true, true, true, false];
        predicted.extend([false; 6]);
        actual.extend([true, false, false, false, false, false]);
        let scores: Vec<f64> = predicted.iter().map(|&p| p as u8 as f64).collect();
        let m = classification_metrics(&predicted, &scores, &actual).unwrap();
        assert_eq!(m.recall, Some(0.75));
        assert_eq!(m.precision, Some(0.75));
        assert!((m.false_alarm.unwrap() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn perfect_and_absent() {
        let actual = [true, false, true, false];
        let m = classification_metrics(&actual, &[0.9, 0.1, 0.8, 0.2], &actual).unwrap();
        assert_eq!((m.recall, m.precision, m.false_alarm, m.auc), (Some(1.0), Some(1.0), Some(0.0), Some(1.0)));
        let none = classification_metrics(&[false; 3], &[0.0; 3], &[false; 3]).unwrap();
        assert_eq!((none.recall, none.precision, none.auc), (None, None, None));
        assert_eq!(none.false_alarm, Some(0.0));
    }

    #[test]
    fn auc_ties_half() {
        assert_eq!(auc(&[0.3; 6], &[true, false, true, false, false, true]), Some(0.5));
        assert_eq!(auc(&[0.1, 0.9], &[true, false]), Some(0.0));
    }

    #[test]
    fn mse_examples() {
        assert_eq!(mse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(mse(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(mse(&[0.0], &[3.0]).unwrap(), 9.0);
        assert!(mse(&[], &[]).is_err());
    }
}
