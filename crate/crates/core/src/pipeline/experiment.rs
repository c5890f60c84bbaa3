use super::config::ConfigMap;
use super::io::{load_dataset, write_front};
use crate::error::{Error, Result};
use crate::indicators::Front;
use crate::model::Direction;
use crate::optimizers::{DeParams, GaParams, OptimizerConfig, SwayParams};
use crate::problems::{make_problem, ProblemDescriptor};
use crate::rng::Seed;
use crate::tuning::{de_tune, Learner, Metric, Params, TuningSpec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format `{other}` (csv or json)"))),
        }
    }
}

/// Formats listed as `csv`, `json` or `csv,json`.
pub fn parse_formats(s: &str) -> Result<Vec<Format>> {
    let mut out: Vec<Format> = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let f = part.parse()?;
        if !out.contains(&f) {
            out.push(f);
        }
    }
    if out.is_empty() {
        return Err(Error::Config("no output format".into()));
    }
    Ok(out)
}

/// Optimizer named by `optimizer` (`de`, `ga` or `sway`) with its
/// parameters read from the same map; missing values take the defaults.
pub fn optimizer_from_config(map: &ConfigMap, arity: usize) -> Result<OptimizerConfig> {
    match map.get("optimizer").unwrap_or("de") {
        "de" => {
            let d = DeParams::defaults(arity);
            Ok(OptimizerConfig::De(DeParams {
                np: map.parse_or("np", d.np)?,
                f: map.parse_or("f", d.f)?,
                cr: map.parse_or("cr", d.cr)?,
                generations: map.parse_or("generations", d.generations)?,
            }))
        }
        "ga" => {
            let d = GaParams::default();
            Ok(OptimizerConfig::Ga(GaParams {
                np: map.parse_or("np", d.np)?,
                generations: map.parse_or("generations", d.generations)?,
                mutation_rate: map.parse_opt("mutation-rate")?.or(d.mutation_rate),
                mutation_scale: map.parse_or("mutation-scale", d.mutation_scale)?,
            }))
        }
        "sway" => Ok(OptimizerConfig::Sway(SwayParams {
            n0: map.parse_or("n0", 10_000)?,
            stop: map.parse_or("stop", 20)?,
        })),
        other => Err(Error::Config(format!("unknown optimizer `{other}` (de, ga or sway)"))),
    }
}

/// DE settings for tuning: `np` 10 and 3 generations unless given.
pub fn tuner_de_from_config(map: &ConfigMap) -> Result<DeParams> {
    Ok(DeParams {
        np: map.parse_or("np", 10)?,
        f: map.parse_or("f", 0.75)?,
        cr: map.parse_or("cr", 0.3)?,
        generations: map.parse_or("generations", 3)?,
    })
}

pub fn tuning_spec_from_config(map: &ConfigMap) -> Result<TuningSpec> {
    let learner: Learner = map.parse_or("learner", Learner::SmoteCart)?;
    let metric: Metric = map.parse_or("metric", Metric::Recall)?;
    let mut spec = TuningSpec::new(learner, metric);
    spec.folds = map.parse_or("folds", spec.folds)?;
    spec.repeats = map.parse_or("cv-repeats", spec.repeats)?;
    Ok(spec)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Task {
    Optimize {
        problem: ProblemDescriptor,
        optimizer: OptimizerConfig,
    },
    Tune {
        dataset: PathBuf,
        spec: TuningSpec,
        de: DeParams,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub task: Task,
    pub repeats: usize,
    pub seed: Seed,
    pub out: Option<PathBuf>,
    pub formats: Vec<Format>,
}

impl ExperimentConfig {
    /// `dataset` selects tuning, otherwise `problem` selects optimization.
    pub fn from_config(map: &ConfigMap) -> Result<Self> {
        let task = if let Some(path) = map.get("dataset") {
            let dataset = PathBuf::from(path);
            if !dataset.is_file() {
                return Err(Error::Config(format!("dataset `{path}` does not exist")));
            }
            Task::Tune {
                dataset,
                spec: tuning_spec_from_config(map)?,
                de: tuner_de_from_config(map)?,
            }
        } else {
            let problem: ProblemDescriptor = map.require("problem")?.parse()?;
            let arity = make_problem(&problem)?.arity();
            Task::Optimize {
                optimizer: optimizer_from_config(map, arity)?,
                problem,
            }
        };
        let repeats = map.parse_or("repeats", 1usize)?;
        if repeats == 0 {
            return Err(Error::Config("repeats must be >= 1".into()));
        }
        Ok(ExperimentConfig {
            task,
            repeats,
            seed: Seed(map.parse_or("seed", 0u64)?),
            out: map.get("out").map(PathBuf::from),
            formats: map.get("format").map_or(Ok(vec![Format::Csv, Format::Json]), parse_formats)?,
        })
    }

    /// SHA-256 of everything that shapes the results (not `out`/`formats`).
    pub fn hash(&self) -> String {
        let canonical = format!("{:?}|{}|{}", self.task, self.repeats, self.seed.0);
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepeatRow {
    pub repeat: usize,
    pub seed: u64,
    pub champion: Vec<f64>,
    pub evals: u64,
    pub front_size: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub params: Option<Params>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub default_fitness: Option<f64>,
    #[serde(skip)]
    pub front: Option<Front>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub task: String,
    pub config_hash: String,
    pub seed: u64,
    pub goals: Vec<String>,
    pub directions: Vec<Direction>,
    pub repeats: Vec<RepeatRow>,
    pub median_champion: Vec<f64>,
    pub median_evals: f64,
    pub total_evals: u64,
    /// Wall-clock seconds per repeat; kept out of the report payloads.
    #[serde(skip)]
    pub wall_secs: Vec<f64>,
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn run_repeat(task: &Task, data: Option<&crate::miners::Dataset>, repeat: usize, seed: Seed) -> Result<RepeatRow> {
    match task {
        Task::Optimize { problem, optimizer } => {
            let mut p = make_problem(problem)?;
            let before = p.evals();
            let res = optimizer.run(&mut p, seed)?;
            let delta = p.evals() - before;
            if res.evals != delta {
                return Err(Error::Contract(format!(
                    "optimizer reported {} evals but the problem counted {delta}",
                    res.evals
                )));
            }
            let front = Front::new(
                res.front.iter().map(|c| c.scores().to_vec()).collect(),
                p.directions().to_vec(),
            )?;
            Ok(RepeatRow {
                repeat,
                seed: seed.0,
                champion: res.best.scores().to_vec(),
                evals: res.evals,
                front_size: res.front.len(),
                params: None,
                default_fitness: None,
                front: Some(front),
            })
        }
        Task::Tune { spec, de, .. } => {
            let data = data.expect("dataset loaded for tuning");
            let r = de_tune(spec, data, de, seed)?;
            Ok(RepeatRow {
                repeat,
                seed: seed.0,
                champion: vec![r.best_fitness],
                evals: r.evals() as u64,
                front_size: 1,
                params: Some(r.best.clone()),
                default_fitness: r.default_fitness,
                front: None,
            })
        }
    }
}

/// Run every repeat (repeat `i` with seed `seed + i`) and write the report
/// files when `out` is set.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunReport> {
    let (task_name, goals, directions, data) = match &config.task {
        Task::Optimize { problem, optimizer } => {
            let p = make_problem(problem)?;
            (
                format!("optimize {} {}", p.name(), optimizer.name()),
                p.goal_names().to_vec(),
                p.directions().to_vec(),
                None,
            )
        }
        Task::Tune { dataset, spec, .. } => (
            format!("tune {} {}", spec.learner, spec.metric),
            vec![spec.metric.name().to_string()],
            vec![spec.metric.direction()],
            Some(load_dataset(dataset)?),
        ),
    };
    let mut repeats = Vec::with_capacity(config.repeats);
    let mut wall_secs = Vec::with_capacity(config.repeats);
    for i in 0..config.repeats {
        let start = Instant::now();
        repeats.push(run_repeat(&config.task, data.as_ref(), i, config.seed.derive(i as u64))?);
        wall_secs.push(start.elapsed().as_secs_f64());
    }
    let median_champion = (0..goals.len())
        .map(|g| median(&repeats.iter().map(|r| r.champion[g]).collect::<Vec<_>>()))
        .collect();
    let report = RunReport {
        task: task_name,
        config_hash: config.hash(),
        seed: config.seed.0,
        goals,
        directions,
        median_champion,
        median_evals: median(&repeats.iter().map(|r| r.evals as f64).collect::<Vec<_>>()),
        total_evals: repeats.iter().map(|r| r.evals).sum(),
        repeats,
        wall_secs,
    };
    if let Some(out) = &config.out {
        emit(&report, out, &config.formats)?;
    }
    Ok(report)
}

fn goal_header(report: &RunReport) -> Vec<String> {
    report
        .goals
        .iter()
        .zip(&report.directions)
        .map(|(g, d)| format!("{}{g}", if *d == Direction::Minimize { '<' } else { '>' }))
        .collect()
}

/// One row per repeat: `repeat, seed, evals, front_size`, then the champion
/// goals with direction prefixes.
pub fn write_report_csv<W: Write>(writer: W, report: &RunReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["repeat".to_string(), "seed".into(), "evals".into(), "front_size".into()];
    header.extend(goal_header(report));
    w.write_record(&header)?;
    for r in &report.repeats {
        let mut rec = vec![r.repeat.to_string(), r.seed.to_string(), r.evals.to_string(), r.front_size.to_string()];
        rec.extend(r.champion.iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn report_json(report: &RunReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)? + "\n")
}

/// `report.csv` / `report.json` (deterministic), `front-<i>.csv` per
/// optimization repeat, and `timing.json` with wall-clock times.
pub fn emit(report: &RunReport, out: &Path, formats: &[Format]) -> Result<()> {
    fs::create_dir_all(out)?;
    for f in formats {
        match f {
            Format::Csv => write_report_csv(fs::File::create(out.join("report.csv"))?, report)?,
            Format::Json => fs::write(out.join("report.json"), report_json(report)?)?,
        }
    }
    for r in &report.repeats {
        if let Some(front) = &r.front {
            write_front(
                fs::File::create(out.join(format!("front-{}.csv", r.repeat)))?,
                front,
                Some(&report.goals),
            )?;
        }
    }
    let timing = serde_json::json!({ "wall_secs": report.wall_secs });
    fs::write(out.join("timing.json"), serde_json::to_string_pretty(&timing)? + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere_config(out: Option<PathBuf>) -> ExperimentConfig {
        let map = ConfigMap::parse("problem=sphere(d=2)\noptimizer=de\nnp=6\ngenerations=3\nrepeats=5\nseed=42\n").unwrap();
        let mut c = ExperimentConfig::from_config(&map).unwrap();
        c.out = out;
        c
    }

    #[test]
    fn repeats_and_accounting() {
        let r = run_experiment(&sphere_config(None)).unwrap();
        assert_eq!(r.repeats.len(), 5);
        assert_eq!(r.total_evals, 5 * 24);
        assert_eq!(r.repeats[3].seed, 45);
    }

    #[test]
    fn payloads_are_byte_identical() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        run_experiment(&sphere_config(Some(a.path().into()))).unwrap();
        run_experiment(&sphere_config(Some(b.path().into()))).unwrap();
        for f in ["report.csv", "report.json", "front-0.csv"] {
            assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
        }
    }

    #[test]
    fn config_errors() {
        assert!(ExperimentConfig::from_config(&ConfigMap::parse("repeats=2").unwrap()).is_err());
        assert!(ExperimentConfig::from_config(&ConfigMap::parse("problem=sphere(d=2)\nrepeats=0").unwrap()).is_err());
        assert!(ExperimentConfig::from_config(&ConfigMap::parse("dataset=/no/such/file.csv").unwrap()).is_err());
        assert!(ExperimentConfig::from_config(&ConfigMap::parse("problem=sphere(d=2)\noptimizer=sa").unwrap()).is_err());
    }
}
