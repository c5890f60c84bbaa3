use super::{
    biobjective_curve, configuration_space, sphere, Problem, ProductLineInstance,
    RequirementsInstance,
};
use crate::error::{Error, Result};
use crate::rng::Seed;
use std::collections::BTreeMap;
use std::str::FromStr;

/// Which benchmark to build.
///
/// Textual form is `name(key=value,...)`; list values use `;` as separator:
///
/// ```text
/// sphere(d=5)
/// biobjective-curve(d=10)
/// requirements(n=12,seed=4)
/// requirements(values=10;6;5,costs=5;3;2,budget=5)
/// product-line(features=60,seed=1)
/// product-line(tiny)
/// configurations(d=6,levels=5,seed=0)
/// ```
#[derive(Clone, Debug, PartialEq)]
pub enum ProblemDescriptor {
    Sphere { d: usize },
    BiobjectiveCurve { d: usize },
    Requirements(RequirementsInstance),
    ProductLine(ProductLineInstance),
    Configurations { d: usize, levels: i64, seed: u64 },
}

pub fn make_problem(desc: &ProblemDescriptor) -> Result<Problem> {
    match desc {
        ProblemDescriptor::Sphere { d } => sphere(*d),
        ProblemDescriptor::BiobjectiveCurve { d } => biobjective_curve(*d),
        ProblemDescriptor::Requirements(inst) => inst.clone().into_problem(),
        ProblemDescriptor::ProductLine(inst) => inst.clone().into_problem(),
        ProblemDescriptor::Configurations { d, levels, seed } => {
            configuration_space(*d, *levels, Seed(*seed))
        }
    }
}

impl FromStr for ProblemDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = match s.find('(') {
            Some(open) => {
                let inner = s[open + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Config(format!("unbalanced parentheses in `{s}`")))?;
                (&s[..open], inner)
            }
            None => (s, ""),
        };
        let mut kv = BTreeMap::new();
        let mut flags = Vec::new();
        for part in args.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part.split_once('=') {
                Some((k, v)) => {
                    kv.insert(k.trim().to_string(), v.trim().to_string());
                }
                None => flags.push(part.to_string()),
            }
        }
        let args = Args { kv, problem: name };
        match name.trim() {
            "sphere" => Ok(ProblemDescriptor::Sphere { d: args.num("d", 5)? }),
            "biobjective-curve" => Ok(ProblemDescriptor::BiobjectiveCurve { d: args.num("d", 10)? }),
            "requirements" => {
                let inst = if args.kv.contains_key("values") {
                    RequirementsInstance::new(
                        args.list("values")?,
                        args.list("costs")?,
                        args.num("budget", 0.0)?,
                    )?
                } else {
                    let inst = RequirementsInstance::random(args.num("n", 10)?, Seed(args.num("seed", 0)?))?;
                    match args.kv.get("budget") {
                        Some(_) => RequirementsInstance { budget: args.num("budget", 0.0)?, ..inst },
                        None => inst,
                    }
                };
                Ok(ProblemDescriptor::Requirements(inst))
            }
            "product-line" => {
                if flags.iter().any(|f| f == "tiny") {
                    return Ok(ProblemDescriptor::ProductLine(ProductLineInstance::tiny()));
                }
                Ok(ProblemDescriptor::ProductLine(ProductLineInstance::random(
                    args.num("features", 40)?,
                    Seed(args.num("seed", 0)?),
                )?))
            }
            "configurations" => Ok(ProblemDescriptor::Configurations {
                d: args.num("d", 6)?,
                levels: args.num("levels", 5)?,
                seed: args.num("seed", 0)?,
            }),
            other => Err(Error::UnknownProblem(other.to_string())),
        }
    }
}

struct Args<'a> {
    kv: BTreeMap<String, String>,
    problem: &'a str,
}

impl Args<'_> {
    fn num<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.kv.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::Config(format!("{}: bad value `{v}` for `{key}`", self.problem))),
        }
    }

    fn list(&self, key: &str) -> Result<Vec<f64>> {
        let raw = self
            .kv
            .get(key)
            .ok_or_else(|| Error::Config(format!("{}: missing `{key}`", self.problem)))?;
        raw.split(';')
            .map(|v| {
                v.trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("{}: bad number `{v}` in `{key}`", self.problem)))
            })
            .collect()
    }
}
