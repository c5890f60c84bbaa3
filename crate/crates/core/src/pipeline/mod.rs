//! Composition and plumbing: cluster-then-tune, experiment runs, file I/O
//! and configuration.

mod cluster;
mod config;
mod experiment;
mod io;

pub use cluster::{cluster_then_optimize, ClusterReport, ClusterRun, Merge};
pub use config::ConfigMap;
pub use experiment::{
    emit, median, optimizer_from_config, parse_formats, report_json, run_experiment, tuner_de_from_config,
    tuning_spec_from_config, write_report_csv, ExperimentConfig, Format, RepeatRow, RunReport, Task,
};
pub use io::{load_dataset, load_front, read_dataset, read_front, save_dataset, save_front, write_dataset, write_front};
