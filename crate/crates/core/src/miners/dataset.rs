use crate::error::{Error, Result};
use crate::model::Direction;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

/// What a column is used for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    Feature,
    Goal(Direction),
    Class,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
    pub role: Role,
}

impl Column {
    pub fn numeric(name: impl Into<String>) -> Self {
        Column {
            name: name.into(),
            kind: ColumnKind::Numeric,
            role: Role::Feature,
        }
    }

    pub fn categorical(name: impl Into<String>) -> Self {
        Column {
            name: name.into(),
            kind: ColumnKind::Categorical,
            role: Role::Feature,
        }
    }

    pub fn class(name: impl Into<String>) -> Self {
        Column {
            name: name.into(),
            kind: ColumnKind::Categorical,
            role: Role::Class,
        }
    }

    pub fn goal(name: impl Into<String>, direction: Direction) -> Self {
        Column {
            name: name.into(),
            kind: ColumnKind::Numeric,
            role: Role::Goal(direction),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Value {
    Num(f64),
    Cat(String),
}

impl Value {
    pub fn as_num(&self) -> Option<f64> {
        match self {
            Value::Num(v) => Some(*v),
            Value::Cat(_) => None,
        }
    }

    pub fn as_cat(&self) -> Option<&str> {
        match self {
            Value::Cat(s) => Some(s),
            Value::Num(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Num(v) => write!(f, "{v}"),
            Value::Cat(s) => f.write_str(s),
        }
    }
}

/// Rectangular table of typed values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    columns: Vec<Column>,
    rows: Vec<Vec<Value>>,
}

impl Dataset {
    pub fn new(columns: Vec<Column>, rows: Vec<Vec<Value>>) -> Result<Self> {
        let d = Dataset { columns, rows: Vec::with_capacity(rows.len()) };
        let mut d = d;
        if d.columns.iter().filter(|c| c.role == Role::Class).count() > 1 {
            return Err(Error::invalid("at most one class column is allowed"));
        }
        for c in &d.columns {
            if matches!(c.role, Role::Goal(_)) && c.kind != ColumnKind::Numeric {
                return Err(Error::invalid(format!("goal column `{}` must be numeric", c.name)));
            }
        }
        for row in rows {
            d.push_row(row)?;
        }
        Ok(d)
    }

    /// Numeric feature columns named `x0..` from a matrix.
    pub fn from_matrix(rows: &[Vec<f64>]) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        let columns = (0..width).map(|j| Column::numeric(format!("x{j}"))).collect();
        Dataset::new(
            columns,
            rows.iter()
                .map(|r| r.iter().map(|&v| Value::Num(v)).collect())
                .collect(),
        )
    }

    pub fn push_row(&mut self, row: Vec<Value>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::RaggedRow {
                row: self.rows.len(),
                expected: self.columns.len(),
                found: row.len(),
            });
        }
        for (v, c) in row.iter().zip(&self.columns) {
            let ok = matches!(
                (v, c.kind),
                (Value::Num(_), ColumnKind::Numeric) | (Value::Cat(_), ColumnKind::Categorical)
            );
            if !ok {
                return Err(Error::Contract(format!(
                    "row {}: value `{v}` does not match type of column `{}`",
                    self.rows.len(),
                    c.name
                )));
            }
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn feature_indices(&self) -> Vec<usize> {
        self.indices_where(|c| c.role == Role::Feature)
    }

    pub fn goal_indices(&self) -> Vec<usize> {
        self.indices_where(|c| matches!(c.role, Role::Goal(_)))
    }

    pub fn class_index(&self) -> Option<usize> {
        self.columns.iter().position(|c| c.role == Role::Class)
    }

    fn indices_where(&self, pred: impl Fn(&Column) -> bool) -> Vec<usize> {
        (0..self.columns.len()).filter(|&i| pred(&self.columns[i])).collect()
    }

    /// All values of a numeric column.
    pub fn numeric(&self, col: usize) -> Result<Vec<f64>> {
        self.check_column(col)?;
        self.rows
            .iter()
            .map(|r| {
                r[col]
                    .as_num()
                    .ok_or_else(|| Error::invalid(format!("column `{}` is not numeric", self.columns[col].name)))
            })
            .collect()
    }

    /// Labels of a categorical column.
    pub fn labels(&self, col: usize) -> Result<Vec<&str>> {
        self.check_column(col)?;
        self.rows
            .iter()
            .map(|r| {
                r[col]
                    .as_cat()
                    .ok_or_else(|| Error::invalid(format!("column `{}` is not categorical", self.columns[col].name)))
            })
            .collect()
    }

    /// Sorted distinct values of a categorical column.
    pub fn categories(&self, col: usize) -> Result<Vec<String>> {
        let set: BTreeSet<&str> = self.labels(col)?.into_iter().collect();
        Ok(set.into_iter().map(str::to_string).collect())
    }

    pub(crate) fn check_column(&self, col: usize) -> Result<()> {
        if col >= self.columns.len() {
            return Err(Error::invalid(format!("no column {col}")));
        }
        Ok(())
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            columns: self.columns.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    /// Feature columns as a numeric matrix, categoricals one-hot expanded
    /// in sorted category order.
    pub fn numeric_matrix(&self) -> Result<Vec<Vec<f64>>> {
        let features = self.feature_indices();
        let mut levels: Vec<Option<Vec<String>>> = Vec::with_capacity(features.len());
        for &f in &features {
            levels.push(match self.columns[f].kind {
                ColumnKind::Numeric => None,
                ColumnKind::Categorical => Some(self.categories(f)?),
            });
        }
        Ok(self
            .rows
            .iter()
            .map(|row| {
                let mut out = Vec::new();
                for (&f, lv) in features.iter().zip(&levels) {
                    match (&row[f], lv) {
                        (Value::Num(v), _) => out.push(*v),
                        (Value::Cat(s), Some(lv)) => out.extend(lv.iter().map(|l| f64::from(u8::from(l == s)))),
                        (Value::Cat(_), None) => unreachable!("column types are validated on insert"),
                    }
                }
                out
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ragged_rows_rejected() {
        let err = Dataset::new(
            vec![Column::numeric("a"), Column::numeric("b")],
            vec![vec![Value::Num(1.0)]],
        )
        .unwrap_err();
        assert!(matches!(err, Error::RaggedRow { row: 0, expected: 2, found: 1 }));
    }

    #[test]
    fn type_mismatch_rejected() {
        assert!(Dataset::new(vec![Column::numeric("a")], vec![vec![Value::Cat("x".into())]]).is_err());
    }

    #[test]
    fn one_hot_matrix() {
        let d = Dataset::new(
            vec![Column::numeric("a"), Column::categorical("c"), Column::class("y")],
            vec![
                vec![Value::Num(1.0), Value::Cat("red".into()), Value::Cat("t".into())],
                vec![Value::Num(2.0), Value::Cat("blue".into()), Value::Cat("f".into())],
            ],
        )
        .unwrap();
        assert_eq!(
            d.numeric_matrix().unwrap(),
            vec![vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]]
        );
        assert_eq!(d.class_index(), Some(2));
        assert_eq!(d.feature_indices(), vec![0, 1]);
    }
}
