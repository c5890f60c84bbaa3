//! `duo` command line.
//!
//! Every flag has a config-file twin: `--cv-repeats 2` and `cv-repeats = 2`
//! set the same key. The file named by `--config` is read first and flags
//! override it. Exit status is 0 on success, 1 for usage and configuration
//! errors and 2 when a run fails.

mod commands;
mod output;

use clap::{Args, Parser, Subcommand};
use duo::pipeline::ConfigMap;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "duo", version, about = "Multi-objective optimization, tuning and front metrics")]
struct Cli {
    /// Master seed; repeat i runs with seed + i.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Flat key = value file; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Directory for report files. Without it the report goes to stdout.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Report format (csv or json).
    #[arg(long, global = true, value_name = "csv|json")]
    format: Option<String>,
    #[arg(long, global = true)]
    repeats: Option<usize>,
    /// Extra config entry, repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run DE, the GA or SWAY on a problem.
    Optimize(OptimizeArgs),
    /// Sample a problem with SWAY.
    Sample(SampleArgs),
    /// FLASH search over a random pool of decisions.
    Flash(FlashArgs),
    /// Tune a learner on a dataset and compare against its defaults.
    Tune(TuneArgs),
    /// Rank decision ranges and build the decision ladder.
    Star(StarArgs),
    /// Indicators of a predicted front against an actual front.
    Metrics(MetricsArgs),
    /// Cluster a dataset, then tune inside each cluster.
    Pipeline(PipelineArgs),
}

#[derive(Args, Debug)]
struct ProblemArgs {
    /// Problem descriptor, e.g. `requirements(n=20,seed=1)`.
    #[arg(long)]
    problem: Option<String>,
}

#[derive(Args, Debug)]
struct OptimizerArgs {
    /// de, ga or sway.
    #[arg(long)]
    optimizer: Option<String>,
    #[arg(long)]
    np: Option<usize>,
    #[arg(long)]
    generations: Option<usize>,
    #[arg(long)]
    f: Option<f64>,
    #[arg(long)]
    cr: Option<f64>,
    #[arg(long)]
    mutation_rate: Option<f64>,
    #[arg(long)]
    mutation_scale: Option<f64>,
    #[arg(long)]
    n0: Option<usize>,
    #[arg(long)]
    stop: Option<usize>,
}

#[derive(Args, Debug)]
struct TunerArgs {
    /// CSV dataset with a `!class` column or `<`/`>` goal columns.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// cart or smote-cart.
    #[arg(long)]
    learner: Option<String>,
    /// recall, precision, false-alarm, auc or mse.
    #[arg(long)]
    metric: Option<String>,
    #[arg(long)]
    np: Option<usize>,
    #[arg(long)]
    generations: Option<usize>,
    /// Cap on fitness evaluations; sets generations to budget / np - 1.
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    cv_repeats: Option<usize>,
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    optimizer: OptimizerArgs,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long)]
    n0: Option<usize>,
    #[arg(long)]
    stop: Option<usize>,
}

#[derive(Args, Debug)]
struct FlashArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Pool size.
    #[arg(long)]
    pool: Option<usize>,
    #[arg(long)]
    init: Option<usize>,
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Args, Debug)]
struct TuneArgs {
    #[command(flatten)]
    tuner: TunerArgs,
}

#[derive(Args, Debug)]
struct StarArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    optimizer: OptimizerArgs,
    /// Share of candidates taken as "best".
    #[arg(long)]
    ratio: Option<f64>,
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long)]
    rungs: Option<usize>,
}

#[derive(Args, Debug)]
struct MetricsArgs {
    /// Front file to score.
    predicted: Option<PathBuf>,
    /// Reference front.
    actual: Option<PathBuf>,
    /// Hypervolume reference point, comma separated, in goal units.
    #[arg(long)]
    reference: Option<String>,
    /// Monte Carlo samples for hypervolume with three or more goals.
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Args, Debug)]
struct PipelineArgs {
    #[command(flatten)]
    tuner: TunerArgs,
    #[arg(long)]
    k: Option<usize>,
}

/// Failure with its exit status.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Runtime(_) => 2,
        }
    }
}

impl From<duo::Error> for Failure {
    fn from(e: duo::Error) -> Self {
        use duo::Error::*;
        match e {
            Config(_) | UnknownProblem(_) | InvalidParameter(_) => Failure::Usage(e.to_string()),
            Rung { ref source, .. } if matches!(**source, InvalidParameter(_)) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

macro_rules! put {
    ($map:expr, $($key:literal => $val:expr),* $(,)?) => {
        $( if let Some(v) = &$val { $map.set($key, v.to_string()); } )*
    };
}

impl ProblemArgs {
    fn apply(&self, m: &mut ConfigMap) {
        put!(m, "problem" => self.problem);
    }
}

impl OptimizerArgs {
    fn apply(&self, m: &mut ConfigMap) {
        put!(m,
            "optimizer" => self.optimizer, "np" => self.np, "generations" => self.generations,
            "f" => self.f, "cr" => self.cr, "mutation-rate" => self.mutation_rate,
            "mutation-scale" => self.mutation_scale, "n0" => self.n0, "stop" => self.stop,
        );
    }
}

impl TunerArgs {
    fn apply(&self, m: &mut ConfigMap) {
        put!(m,
            "dataset" => self.dataset.as_ref().map(|p| p.display()), "learner" => self.learner,
            "metric" => self.metric, "np" => self.np, "generations" => self.generations,
            "budget" => self.budget, "folds" => self.folds, "cv-repeats" => self.cv_repeats,
        );
    }
}

fn config_map(cli: &Cli) -> Result<ConfigMap, Failure> {
    let mut map = match &cli.config {
        Some(path) => ConfigMap::load(path)?,
        None => ConfigMap::new(),
    };
    let mut flags = ConfigMap::new();
    put!(flags,
        "seed" => cli.seed, "out" => cli.out.as_ref().map(|p| p.display()),
        "format" => cli.format, "repeats" => cli.repeats,
    );
    for kv in &cli.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        flags.set(k, v.trim());
    }
    match &cli.command {
        Command::Optimize(a) => {
            a.problem.apply(&mut flags);
            a.optimizer.apply(&mut flags);
        }
        Command::Sample(a) => {
            a.problem.apply(&mut flags);
            put!(flags, "n0" => a.n0, "stop" => a.stop);
        }
        Command::Flash(a) => {
            a.problem.apply(&mut flags);
            put!(flags, "pool" => a.pool, "init" => a.init, "budget" => a.budget);
        }
        Command::Tune(a) => a.tuner.apply(&mut flags),
        Command::Star(a) => {
            a.problem.apply(&mut flags);
            a.optimizer.apply(&mut flags);
            put!(flags, "ratio" => a.ratio, "bins" => a.bins, "rungs" => a.rungs);
        }
        Command::Metrics(a) => {
            put!(flags,
                "predicted" => a.predicted.as_ref().map(|p| p.display()),
                "actual" => a.actual.as_ref().map(|p| p.display()),
                "reference" => a.reference, "samples" => a.samples,
            );
        }
        Command::Pipeline(a) => {
            a.tuner.apply(&mut flags);
            put!(flags, "k" => a.k);
        }
    }
    map.overlay(&flags);
    Ok(map)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let mut map = config_map(cli)?;
    match &cli.command {
        Command::Optimize(_) => commands::optimize(&map),
        Command::Sample(_) => {
            map.set("optimizer", "sway");
            commands::optimize(&map)
        }
        Command::Flash(_) => commands::flash(&map),
        Command::Tune(_) => commands::tune(&map),
        Command::Star(_) => commands::star(&map),
        Command::Metrics(_) => commands::metrics(&map),
        Command::Pipeline(_) => commands::pipeline(&map),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Usage(msg) | Failure::Runtime(msg)) = &f;
            eprintln!("duo: {msg}");
            ExitCode::from(f.code())
        }
    }
}
