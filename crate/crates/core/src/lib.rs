//! Data miners and optimizers in one toolkit: multi-goal optimizers (DE, an
//! NSGA-II style GA, SWAY, FLASH), miners (CART, k-means, SMOTE,
//! discretization), STAR range ranking, learner tuning, quality indicators
//! and experiment plumbing.
//!
//! Every stochastic operation takes a [`Seed`]; the same seed and inputs give
//! the same output.

pub mod dominance;
pub mod error;
pub mod indicators;
pub mod miners;
pub mod model;
pub mod optimizers;
pub mod pipeline;
pub mod problems;
pub mod rng;
pub mod star;
pub mod tuning;

pub use dominance::{boolean_dominates, nondominated_filter, normalize, zitzler_better};
pub use error::{Error, Result};
pub use indicators::Front;
pub use miners::{Dataset, Value};
pub use model::{Candidate, Direction, ObjectiveSpec};
pub use optimizers::{OptimizerConfig, OptimizerResult};
pub use problems::{Domain, Problem, ProblemDescriptor};
pub use rng::Seed;
