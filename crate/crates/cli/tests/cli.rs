use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn duo(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_duo")).args(args).current_dir(dir).output().unwrap()
}

fn ok(args: &[&str], dir: &Path) -> String {
    let out = duo(args, dir);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str], dir: &Path) -> i32 {
    duo(args, dir).status.code().unwrap()
}

fn write_dataset(path: &Path) {
    let mut text = String::from("x0,x1,!defect\n");
    for i in 0..60 {
        let pos = i % 5 == 0;
        let jitter = (i * 37 % 11) as f64 / 11.0;
        let c = if pos { 1.0 } else { 0.0 };
        text += &format!("{},{},{}\n", c + jitter, c - jitter, if pos { "yes" } else { "no" });
    }
    fs::write(path, text).unwrap();
}

#[test]
fn optimize_prints_prefixed_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&["optimize", "--problem", "requirements(n=8,seed=1)", "--np", "8", "--generations", "2", "--repeats", "3"], dir.path());
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "repeat,seed,evals,front_size,>value,<cost,<violation");
    assert_eq!(lines.count(), 3);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.conf"), "# sphere run\nproblem = sphere(d=2)\nnp = 10\ngenerations = 4\nseed = 7\n").unwrap();
    let from_file = ok(&["optimize", "--config", "run.conf"], dir.path());
    assert!(from_file.lines().nth(1).unwrap().starts_with("0,7,50,"));
    let overridden = ok(&["optimize", "--config", "run.conf", "--np", "6", "--seed", "9"], dir.path());
    assert!(overridden.lines().nth(1).unwrap().starts_with("0,9,30,"));
    let via_set = ok(&["optimize", "--config", "run.conf", "--set", "generations=1"], dir.path());
    assert!(via_set.lines().nth(1).unwrap().starts_with("0,7,20,"));
}

#[test]
fn sample_stays_within_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&["sample", "--problem", "product-line(features=30,seed=2)", "--n0", "4096", "--stop", "16", "--format", "json"], dir.path());
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["total_evals"].as_u64().unwrap() <= 2 * 8 + 16);
    assert!(v["task"].as_str().unwrap().ends_with("sway"));
}

#[test]
fn flash_reports_budget() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&["flash", "--problem", "configurations(d=4,levels=4,seed=1)", "--pool", "100", "--init", "5", "--budget", "20", "--repeats", "2"], dir.path());
    assert_eq!(out.lines().next().unwrap(), "repeat,seed,evals,front_size,<runtime");
    assert!(out.lines().skip(1).all(|l| l.split(',').nth(2) == Some("20")));
}

#[test]
fn tune_compares_against_defaults() {
    let dir = tempfile::tempdir().unwrap();
    write_dataset(&dir.path().join("d.csv"));
    let out = ok(&["tune", "--dataset", "d.csv", "--learner", "cart", "--metric", "auc", "--budget", "24", "--np", "6"], dir.path());
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "repeat,seed,evals,>auc_default,>auc_tuned,max_depth,min_leaf");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[2], "24");
    let (default, tuned): (f64, f64) = (row[3].parse().unwrap(), row[4].parse().unwrap());
    assert!(tuned >= default);
}

#[test]
fn pipeline_tunes_each_cluster() {
    let dir = tempfile::tempdir().unwrap();
    write_dataset(&dir.path().join("d.csv"));
    let out = ok(&["pipeline", "--dataset", "d.csv", "--k", "2", "--np", "4", "--generations", "1", "--learner", "cart"], dir.path());
    let rows: Vec<Vec<String>> = out.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect();
    assert!(!rows.is_empty());
    let total: usize = rows.iter().map(|r| r[3].parse::<usize>().unwrap()).sum();
    assert_eq!(total, 60);
}

#[test]
fn star_writes_ranges_and_ladder() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["star", "--problem", "requirements(n=8,seed=3)", "--optimizer", "ga", "--np", "10", "--generations", "3", "--rungs", "2", "--out", "s"], dir.path());
    let s = dir.path().join("s");
    let ranges = fs::read_to_string(s.join("ranges.csv")).unwrap();
    assert!(ranges.starts_with("rank,decision,range,b,r,s\n"));
    let ladder = fs::read_to_string(s.join("ladder.csv")).unwrap();
    assert!(ladder.lines().count() >= 2);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(s.join("report.json")).unwrap()).unwrap();
    assert!(v["ladder"]["rungs"].as_array().unwrap().len() <= 2);
    assert!(s.join("timing.json").is_file());
}

#[test]
fn metrics_table_and_untouched_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let (p, a) = (dir.path().join("p.csv"), dir.path().join("a.csv"));
    fs::write(&p, "<f1,<f2\n0.5,0.5\n1,0\n").unwrap();
    fs::write(&a, "<f1,<f2\n0,1\n0.5,0.5\n1,0\n").unwrap();
    let before = (fs::read(&p).unwrap(), fs::read(&a).unwrap());
    let out = ok(&["metrics", "p.csv", "a.csv", "--reference", "2,2"], dir.path());
    let table: Vec<(String, f64)> = out
        .lines()
        .skip(1)
        .map(|l| {
            let (k, v) = l.split_once(',').unwrap();
            (k.to_string(), v.parse().unwrap())
        })
        .collect();
    let get = |k: &str| table.iter().find(|(n, _)| n == k).unwrap().1;
    assert_eq!(get("gd"), 0.0);
    assert!(get("igd") > 0.0);
    assert!((get("hv") - 2.75).abs() < 1e-12);
    assert_eq!((fs::read(&p).unwrap(), fs::read(&a).unwrap()), before);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for run in ["a", "b"] {
        ok(&["optimize", "--problem", "biobjective-curve(d=3)", "--optimizer", "ga", "--np", "10", "--generations", "3", "--repeats", "2", "--seed", "11", "--out", run], dir.path());
    }
    let mut names: Vec<String> = fs::read_dir(dir.path().join("a")).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(names, ["front-0.csv", "front-1.csv", "report.csv", "report.json", "timing.json"]);
    for n in names.iter().filter(|n| *n != "timing.json") {
        assert_eq!(fs::read(dir.path().join("a").join(n)).unwrap(), fs::read(dir.path().join("b").join(n)).unwrap(), "{n}");
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&["--help"], d), 0);
    assert_eq!(code(&["frobnicate"], d), 1);
    assert_eq!(code(&["optimize", "--np", "many"], d), 1);
    assert_eq!(code(&["optimize"], d), 1);
    assert_eq!(code(&["optimize", "--problem", "sphere(d=2)", "--format", "xml"], d), 1);
    assert_eq!(code(&["optimize", "--problem", "sphere(d=2)", "--repeats", "0"], d), 1);
    assert_eq!(code(&["optimize", "--config", "absent.conf"], d), 1);
    assert_eq!(code(&["tune", "--dataset", "absent.csv"], d), 1);

    fs::write(d.join("ragged.csv"), "<f1,<f2\n1,2\n3\n").unwrap();
    fs::write(d.join("fine.csv"), "<f1,<f2\n1,2\n").unwrap();
    assert_eq!(code(&["metrics", "ragged.csv", "fine.csv"], d), 2);
    fs::write(d.join("blocker"), "").unwrap();
    assert_eq!(code(&["optimize", "--problem", "sphere(d=2)", "--np", "4", "--generations", "1", "--out", "blocker/x"], d), 2);
}
