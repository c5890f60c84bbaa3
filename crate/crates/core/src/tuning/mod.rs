//! Hyperparameter optimization of miners: metrics, cross-validation, grid
//! search and differential evolution.

mod cv;
mod metrics;
mod search;
mod space;

pub use cv::{cross_validate, fit_and_score, stratified_folds, CvReport, FoldResult, Learner, Target};
pub use metrics::{auc, classification_metrics, mse, Metric, MetricsReport};
pub use search::{de_tune, de_tune_by, grid_search, grid_search_by, tuning_cv_seed, Trial, TuneReport, TuningSpec};
pub use space::{Param, ParamDomain, ParamSpace, Params};
