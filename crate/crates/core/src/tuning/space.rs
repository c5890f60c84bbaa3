use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A named parameter assignment.
pub type Params = BTreeMap<String, f64>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ParamDomain {
    Real { lo: f64, hi: f64 },
    Integer { lo: i64, hi: i64 },
    /// Explicit grid values.
    Values(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    pub domain: ParamDomain,
    pub default: f64,
}

impl Param {
    pub fn new(name: impl Into<String>, domain: ParamDomain, default: f64) -> Self {
        Param {
            name: name.into(),
            domain,
            default,
        }
    }

    fn check(&self) -> Result<()> {
        let bad = |why: &str| Err(Error::invalid(format!("parameter `{}`: {why}", self.name)));
        match &self.domain {
            ParamDomain::Real { lo, hi } if !(lo.is_finite() && hi.is_finite()) => bad("unbounded range"),
            ParamDomain::Real { lo, hi } if lo > hi => bad("empty range"),
            ParamDomain::Integer { lo, hi } if lo > hi => bad("empty range"),
            ParamDomain::Values(v) if v.is_empty() => bad("no grid values"),
            ParamDomain::Values(v) if v.iter().any(|x| !x.is_finite()) => bad("non-finite grid value"),
            _ => Ok(()),
        }
    }

    /// Finite grid of this parameter.
    pub fn grid(&self) -> Result<Vec<f64>> {
        match &self.domain {
            ParamDomain::Values(v) => Ok(v.clone()),
            ParamDomain::Integer { lo, hi } => Ok((*lo..=*hi).map(|v| v as f64).collect()),
            ParamDomain::Real { .. } => Err(Error::invalid(format!(
                "parameter `{}` is continuous; give grid values",
                self.name
            ))),
        }
    }

    /// Gene bounds used by differential evolution.
    pub(crate) fn gene_bounds(&self) -> (f64, f64) {
        match &self.domain {
            ParamDomain::Real { lo, hi } => (*lo, *hi),
            ParamDomain::Integer { lo, hi } => (*lo as f64, *hi as f64),
            ParamDomain::Values(v) => (0.0, (v.len() - 1) as f64),
        }
    }

    pub(crate) fn decode(&self, gene: f64) -> f64 {
        let (lo, hi) = self.gene_bounds();
        let g = gene.clamp(lo, hi);
        match &self.domain {
            ParamDomain::Real { .. } => g,
            ParamDomain::Integer { .. } => g.round(),
            ParamDomain::Values(v) => v[g.round() as usize],
        }
    }

    pub(crate) fn encode(&self, value: f64) -> f64 {
        match &self.domain {
            ParamDomain::Values(v) => {
                let mut best = 0;
                for (i, x) in v.iter().enumerate() {
                    if (x - value).abs() < (v[best] - value).abs() {
                        best = i;
                    }
                }
                best as f64
            }
            _ => {
                let (lo, hi) = self.gene_bounds();
                value.clamp(lo, hi)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamSpace {
    params: Vec<Param>,
}

impl ParamSpace {
    pub fn new(params: Vec<Param>) -> Result<Self> {
        if params.is_empty() {
            return Err(Error::Empty("parameter space"));
        }
        for p in &params {
            p.check()?;
        }
        Ok(ParamSpace { params })
    }

    pub fn params(&self) -> &[Param] {
        &self.params
    }

    pub fn defaults(&self) -> Params {
        self.params.iter().map(|p| (p.name.clone(), p.default)).collect()
    }

    /// Replace one parameter's domain, keeping its default.
    pub fn with_domain(mut self, name: &str, domain: ParamDomain) -> Result<Self> {
        let p = self
            .params
            .iter_mut()
            .find(|p| p.name == name)
            .ok_or_else(|| Error::invalid(format!("no parameter `{name}`")))?;
        p.domain = domain;
        p.check()?;
        Ok(self)
    }

    /// Cartesian product in declaration order, last parameter varying
    /// fastest.
    pub fn grid(&self) -> Result<Vec<Params>> {
        let axes = self.params.iter().map(Param::grid).collect::<Result<Vec<_>>>()?;
        let mut cells = vec![Params::new()];
        for (p, axis) in self.params.iter().zip(&axes) {
            cells = cells
                .into_iter()
                .flat_map(|cell| {
                    axis.iter().map(move |&v| {
                        let mut c = cell.clone();
                        c.insert(p.name.clone(), v);
                        c
                    })
                })
                .collect();
        }
        Ok(cells)
    }

    pub(crate) fn decode(&self, genes: &[f64]) -> Params {
        self.params
            .iter()
            .zip(genes)
            .map(|(p, &g)| (p.name.clone(), p.decode(g)))
            .collect()
    }

    pub(crate) fn encode(&self, params: &Params) -> Vec<f64> {
        self.params
            .iter()
            .map(|p| p.encode(params.get(&p.name).copied().unwrap_or(p.default)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_order_and_size() {
        let s = ParamSpace::new(vec![
            Param::new("a", ParamDomain::Values(vec![1.0, 2.0]), 1.0),
            Param::new("b", ParamDomain::Integer { lo: 0, hi: 2 }, 0.0),
        ])
        .unwrap();
        let g = s.grid().unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!((g[0]["a"], g[0]["b"]), (1.0, 0.0));
        assert_eq!((g[1]["a"], g[1]["b"]), (1.0, 1.0));
        assert_eq!((g[5]["a"], g[5]["b"]), (2.0, 2.0));
    }

    #[test]
    fn validation() {
        assert!(ParamSpace::new(vec![]).is_err());
        let unbounded = Param::new("x", ParamDomain::Real { lo: 0.0, hi: f64::INFINITY }, 1.0);
        assert!(ParamSpace::new(vec![unbounded]).is_err());
        let empty = Param::new("x", ParamDomain::Values(vec![]), 1.0);
        assert!(ParamSpace::new(vec![empty]).is_err());
        let real = ParamSpace::new(vec![Param::new("x", ParamDomain::Real { lo: 0.0, hi: 1.0 }, 0.5)]).unwrap();
        assert!(real.grid().is_err());
    }

    #[test]
    fn encode_decode_roundtrip_of_defaults() {
        let s = ParamSpace::new(vec![
            Param::new("a", ParamDomain::Values(vec![0.1, 0.5, 0.9]), 0.5),
            Param::new("b", ParamDomain::Integer { lo: 1, hi: 20 }, 7.0),
            Param::new("c", ParamDomain::Real { lo: 0.5, hi: 4.0 }, 2.0),
        ])
        .unwrap();
        assert_eq!(s.decode(&s.encode(&s.defaults())), s.defaults());
    }
}
