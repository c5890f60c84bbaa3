use crate::output::{csv_table, json_text, prefixed, Sink};
use crate::Failure;
use duo::indicators::{additive_approx, gd, hypervolume, hypervolume_mc, igd, spread, HV_SAMPLES};
use duo::miners::Dataset;
use duo::optimizers::{flash_optimize, sample_pool};
use duo::pipeline::{
    cluster_then_optimize, emit, load_dataset, median, optimizer_from_config, read_front, report_json,
    run_experiment, tuner_de_from_config, tuning_spec_from_config, write_report_csv, ConfigMap, ExperimentConfig,
    RepeatRow, RunReport,
};
use duo::star::{decision_ladder, decision_ranges, rank_ranges, split_best_rest, RangeScore, Rung, SUPPORT_EXPONENT};
use duo::problems::make_problem;
use duo::{Front, ProblemDescriptor, Seed};
use serde_json::json;
use std::fs::File;
use std::path::Path;
use std::time::Instant;

fn seed(map: &ConfigMap) -> Result<Seed, Failure> {
    Ok(Seed(map.parse_or("seed", 0u64)?))
}

fn repeats(map: &ConfigMap) -> Result<usize, Failure> {
    let n = map.parse_or("repeats", 1usize)?;
    if n == 0 {
        return Err(Failure::Usage("repeats must be >= 1".into()));
    }
    Ok(n)
}

fn problem(map: &ConfigMap) -> Result<(ProblemDescriptor, duo::Problem), Failure> {
    let desc: ProblemDescriptor = map.require("problem")?.parse()?;
    let p = make_problem(&desc)?;
    Ok((desc, p))
}

fn existing_file<'a>(map: &'a ConfigMap, key: &str) -> Result<&'a Path, Failure> {
    let path = Path::new(map.require(key)?);
    if !path.is_file() {
        return Err(Failure::Usage(format!("{key} `{}` does not exist", path.display())));
    }
    Ok(path)
}

/// Converts `budget` into a generation count for the tuner's DE.
fn tuner_map(map: &ConfigMap) -> Result<ConfigMap, Failure> {
    let mut map = map.clone();
    if let Some(budget) = map.parse_opt::<usize>("budget")? {
        if map.get("generations").is_none() {
            let np = map.parse_or("np", 10usize)?;
            if budget < np {
                return Err(Failure::Usage(format!("budget {budget} is smaller than np {np}")));
            }
            map.set("generations", (budget / np - 1).to_string());
        }
    }
    Ok(map)
}

fn report_tables(report: &RunReport) -> Result<Vec<u8>, Failure> {
    let mut buf = Vec::new();
    write_report_csv(&mut buf, report)?;
    Ok(buf)
}

/// `optimize` and `sample`.
pub fn optimize(map: &ConfigMap) -> Result<(), Failure> {
    if map.get("problem").is_none() {
        return Err(Failure::Usage("missing `problem`".into()));
    }
    // A dataset key would switch the experiment to tuning.
    let map = {
        let mut m = ConfigMap::new();
        for (k, v) in map.iter().filter(|(k, _)| *k != "dataset") {
            m.set(k, v);
        }
        m
    };
    let sink = Sink::from_map(&map)?;
    let mut config = ExperimentConfig::from_config(&map)?;
    config.out = None;
    let report = run_experiment(&config)?;
    match &sink.out {
        Some(dir) => Ok(emit(&report, dir, &sink.formats)?),
        None => sink.emit(&[("report.csv", report_tables(&report)?)], &report_json(&report)?, &[]),
    }
}

pub fn flash(map: &ConfigMap) -> Result<(), Failure> {
    let sink = Sink::from_map(map)?;
    let (_, problem) = problem(map)?;
    let seed = seed(map)?;
    let size = map.parse_or("pool", 1000usize)?;
    let init = map.parse_or("init", 10usize)?;
    let budget = map.parse_or("budget", 50usize)?;
    let pool = sample_pool(&problem, size, seed);
    let mut rows = Vec::new();
    let mut wall = Vec::new();
    for i in 0..repeats(map)? {
        let start = Instant::now();
        let mut p = problem.fresh();
        let s = seed.derive(i as u64);
        let r = flash_optimize(&mut p, &pool, init, budget, s)?;
        if r.evals != p.evals() {
            return Err(Failure::Runtime(format!("FLASH reported {} evals, problem counted {}", r.evals, p.evals())));
        }
        rows.push(RepeatRow {
            repeat: i,
            seed: s.0,
            champion: r.best.scores().to_vec(),
            evals: r.evals,
            front_size: 1,
            params: None,
            default_fitness: None,
            front: None,
        });
        wall.push(start.elapsed().as_secs_f64());
    }
    let report = RunReport {
        task: format!("flash {}", problem.name()),
        config_hash: map.fingerprint(),
        seed: seed.0,
        goals: problem.goal_names(),
        directions: problem.directions(),
        median_champion: vec![median(&rows.iter().map(|r| r.champion[0]).collect::<Vec<_>>())],
        median_evals: median(&rows.iter().map(|r| r.evals as f64).collect::<Vec<_>>()),
        total_evals: rows.iter().map(|r| r.evals).sum(),
        repeats: rows,
        wall_secs: wall,
    };
    sink.emit(&[("report.csv", report_tables(&report)?)], &report_json(&report)?, &report.wall_secs)
}

pub fn tune(map: &ConfigMap) -> Result<(), Failure> {
    let sink = Sink::from_map(map)?;
    existing_file(map, "dataset")?;
    let map = tuner_map(map)?;
    let mut config = ExperimentConfig::from_config(&map)?;
    config.out = None;
    let spec = tuning_spec_from_config(&map)?;
    let report = run_experiment(&config)?;

    let direction = spec.metric.direction();
    let metric = spec.metric.name();
    let names: Vec<String> = spec.space.params().iter().map(|p| p.name.clone()).collect();
    let mut header: Vec<String> = ["repeat", "seed", "evals"].map(String::from).to_vec();
    header.push(prefixed(&format!("{metric}_default"), direction));
    header.push(prefixed(&format!("{metric}_tuned"), direction));
    header.extend(names.iter().cloned());
    let rows: Vec<Vec<String>> = report
        .repeats
        .iter()
        .map(|r| {
            let mut row = vec![r.repeat.to_string(), r.seed.to_string(), r.evals.to_string()];
            row.push(r.default_fitness.map_or_else(String::new, |v| v.to_string()));
            row.push(r.champion[0].to_string());
            let params = r.params.as_ref();
            row.extend(names.iter().map(|n| params.and_then(|p| p.get(n)).map_or_else(String::new, f64::to_string)));
            row
        })
        .collect();
    sink.emit(&[("report.csv", csv_table(&header, &rows)?)], &report_json(&report)?, &report.wall_secs)
}

fn describe(asserted: &[RangeScore]) -> String {
    asserted
        .iter()
        .map(|a| format!("x{}={}", a.column, a.range))
        .collect::<Vec<_>>()
        .join(";")
}

pub fn star(map: &ConfigMap) -> Result<(), Failure> {
    let sink = Sink::from_map(map)?;
    let (_, problem) = problem(map)?;
    let config = optimizer_from_config(map, problem.arity())?;
    let seed = seed(map)?;
    let ratio = map.parse_or("ratio", 0.2)?;
    let bins = map.parse_or("bins", 4usize)?;
    let rungs = map.parse_or("rungs", 5usize)?;
    if bins == 0 {
        return Err(Failure::Usage("bins must be >= 1".into()));
    }

    let start = Instant::now();
    let mut explore = problem.fresh();
    let res = config.run(&mut explore, seed)?;
    let (best, rest) = split_best_rest(&res.evaluated, ratio, &problem.spec())?;
    let ranked = rank_ranges(&best, &rest, &decision_ranges(&res.evaluated, bins), SUPPORT_EXPONENT)?;
    let ladder = decision_ladder(&problem, &config, &ranked, rungs, seed)?;
    let wall = start.elapsed().as_secs_f64();

    let range_header: Vec<String> = ["rank", "decision", "range", "b", "r", "s"].map(String::from).to_vec();
    let range_rows: Vec<Vec<String>> = ranked
        .iter()
        .enumerate()
        .map(|(i, s)| {
            vec![(i + 1).to_string(), format!("x{}", s.column), s.range.to_string(), s.b.to_string(), s.r.to_string(), s.s.to_string()]
        })
        .collect();

    let goals = problem.goal_names();
    let mut ladder_header: Vec<String> = ["depth", "asserted", "evals", "front_size"].map(String::from).to_vec();
    ladder_header.extend(goals.iter().zip(problem.directions()).map(|(g, d)| prefixed(g, d)));
    let rung_row = |r: &Rung| {
        let mut row = vec![r.depth.to_string(), describe(&r.asserted), r.evals.to_string(), r.front_size.to_string()];
        row.extend(r.champion.iter().map(f64::to_string));
        row
    };
    let ladder_rows: Vec<Vec<String>> = std::iter::once(&ladder.baseline).chain(&ladder.rungs).map(rung_row).collect();

    let json = json_text(&json!({
        "task": format!("star {} {}", problem.name(), config.name()),
        "config_hash": map.fingerprint(),
        "seed": seed.0,
        "goals": goals,
        "directions": problem.directions(),
        "explore_evals": res.evals,
        "ranges": ranked,
        "ladder": ladder,
        "total_evals": res.evals + ladder.total_evals(),
    }))?;
    sink.emit(
        &[
            ("ranges.csv", csv_table(&range_header, &range_rows)?),
            ("ladder.csv", csv_table(&ladder_header, &ladder_rows)?),
        ],
        &json,
        &[wall],
    )
}

fn front_file(map: &ConfigMap, key: &str) -> Result<Front, Failure> {
    let path = existing_file(map, key)?;
    let file = File::open(path).map_err(|e| Failure::Runtime(e.to_string()))?;
    Ok(read_front(file)?.1)
}

/// Endpoints of a two-goal front along its first goal, in file units.
fn extremes(front: &Front) -> Option<(Vec<f64>, Vec<f64>)> {
    if front.goal_count() != 2 || front.is_empty() {
        return None;
    }
    let key = |p: &Vec<f64>| front.directions[0].to_min(p[0]);
    let first = front.points.iter().min_by(|a, b| key(a).total_cmp(&key(b)))?;
    let last = front.points.iter().max_by(|a, b| key(a).total_cmp(&key(b)))?;
    Some((first.clone(), last.clone()))
}

pub fn metrics(map: &ConfigMap) -> Result<(), Failure> {
    let sink = Sink::from_map(map)?;
    let predicted = front_file(map, "predicted")?;
    let actual = front_file(map, "actual")?;
    if predicted.directions != actual.directions {
        return Err(Failure::Usage("fronts disagree on goal count or directions".into()));
    }
    let mut rows: Vec<(&str, f64)> = vec![
        ("gd", gd(&predicted, &actual)?),
        ("igd", igd(&predicted, &actual)?),
        ("spread", spread(&predicted, extremes(&actual).as_ref().map(|(a, b)| (a.as_slice(), b.as_slice())))?),
        ("epsilon", additive_approx(&predicted, &actual)?),
    ];
    if let Some(text) = map.get("reference") {
        let reference = text
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Failure::Usage(format!("reference `{text}`: {e}")))?;
        if predicted.goal_count() <= 2 {
            rows.push(("hv", hypervolume(&predicted, &reference)?));
        } else {
            let samples = map.parse_or("samples", HV_SAMPLES)?;
            let est = hypervolume_mc(&predicted, &reference, samples, seed(map)?)?;
            rows.push(("hv", est.value));
            rows.push(("hv_std_error", est.std_error));
        }
    }
    let header = vec!["indicator".to_string(), "value".to_string()];
    let table: Vec<Vec<String>> = rows.iter().map(|(k, v)| vec![k.to_string(), v.to_string()]).collect();
    let object: serde_json::Map<String, serde_json::Value> = rows.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    let json = json_text(&json!({ "goals": predicted.goal_count(), "indicators": object }))?;
    sink.emit(&[("report.csv", csv_table(&header, &table)?)], &json, &[])
}

pub fn pipeline(map: &ConfigMap) -> Result<(), Failure> {
    let sink = Sink::from_map(map)?;
    let path = existing_file(map, "dataset")?;
    let map = tuner_map(map)?;
    let spec = tuning_spec_from_config(&map)?;
    let de = tuner_de_from_config(&map)?;
    let k = map.parse_or("k", 2usize)?;
    let seed = seed(&map)?;
    let data: Dataset = load_dataset(path)?;

    let direction = spec.metric.direction();
    let metric = spec.metric.name();
    let mut header: Vec<String> = ["repeat", "seed", "cluster", "rows", "evals"].map(String::from).to_vec();
    header.push(prefixed(&format!("{metric}_default"), direction));
    header.push(prefixed(&format!("{metric}_tuned"), direction));
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    let mut wall = Vec::new();
    for i in 0..repeats(&map)? {
        let start = Instant::now();
        let s = seed.derive(i as u64);
        let report = cluster_then_optimize(&data, k, &spec, &de, s)?;
        wall.push(start.elapsed().as_secs_f64());
        for c in &report.clusters {
            rows.push(vec![
                i.to_string(),
                s.0.to_string(),
                c.cluster.to_string(),
                c.rows.len().to_string(),
                c.evals.to_string(),
                c.tune.default_fitness.map_or_else(String::new, |v| v.to_string()),
                c.tune.best_fitness.to_string(),
            ]);
        }
        reports.push(report);
    }
    let json = json_text(&json!({
        "task": format!("pipeline {} {}", spec.learner, spec.metric),
        "config_hash": map.fingerprint(),
        "seed": seed.0,
        "k": k,
        "repeats": reports,
        "total_evals": reports.iter().map(|r| r.total_evals).sum::<usize>(),
    }))?;
    sink.emit(&[("report.csv", csv_table(&header, &rows)?)], &json, &wall)
}
