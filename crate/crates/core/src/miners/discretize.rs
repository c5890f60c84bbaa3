use super::dataset::{ColumnKind, Dataset, Value};
use crate::error::Result;
use serde::{Deserialize, Serialize};
use std::fmt;

/// One discretized attribute range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Range {
    /// Closed interval of observed values.
    Numeric { lo: f64, hi: f64 },
    Category(String),
}

impl Range {
    pub fn contains(&self, v: &Value) -> bool {
        match (self, v) {
            (Range::Numeric { lo, hi }, Value::Num(x)) => lo <= x && x <= hi,
            (Range::Category(c), Value::Cat(s)) => c == s,
            _ => false,
        }
    }

    pub fn contains_num(&self, x: f64) -> bool {
        matches!(self, Range::Numeric { lo, hi } if *lo <= x && x <= *hi)
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Range::Numeric { lo, hi } if lo == hi => write!(f, "{lo}"),
            Range::Numeric { lo, hi } => write!(f, "{lo}..{hi}"),
            Range::Category(c) => f.write_str(c),
        }
    }
}

/// Equal-frequency ranges for a numeric column; one range per category for
/// a categorical column.
pub fn discretize(data: &Dataset, column: usize, bins: usize) -> Result<Vec<Range>> {
    data.check_column(column)?;
    match data.columns()[column].kind {
        ColumnKind::Numeric => Ok(discretize_values(&data.numeric(column)?, bins)),
        ColumnKind::Categorical => Ok(data
            .categories(column)?
            .into_iter()
            .map(Range::Category)
            .collect()),
    }
}

/// Equal-frequency binning of raw values. A run of equal values is never
/// split across two bins; with at least as many bins as distinct values each
/// value gets its own range.
pub fn discretize_values(values: &[f64], bins: usize) -> Vec<Range> {
    let mut sorted: Vec<f64> = values.iter().copied().filter(|v| !v.is_nan()).collect();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n == 0 {
        return Vec::new();
    }
    let bins = bins.max(1);
    let mut distinct = sorted.clone();
    distinct.dedup();
    if bins >= distinct.len() {
        return distinct.into_iter().map(|v| Range::Numeric { lo: v, hi: v }).collect();
    }

    let mut ranges = Vec::with_capacity(bins);
    let mut start = 0;
    for b in 1..=bins {
        // Nominal end of bin b, pushed right past any run of equal values.
        let mut end = b * n / bins;
        if end <= start {
            continue;
        }
        while end < n && sorted[end] == sorted[end - 1] {
            end += 1;
        }
        ranges.push(Range::Numeric {
            lo: sorted[start],
            hi: sorted[end - 1],
        });
        start = end;
    }
    ranges
}
