//! Data miners written from scratch: CART, k-means, equal-frequency
//! discretization and SMOTE rebalancing, over a small typed [`Dataset`].

mod cart;
mod dataset;
mod discretize;
mod fixtures;
mod kmeans;
mod smote;

pub use cart::{cart_fit, cart_predict, CartParams, Prediction, SplitRule, Tree, TreeNode};
pub use dataset::{Column, ColumnKind, Dataset, Role, Value};
pub use fixtures::imbalanced_fixture;
pub use discretize::{discretize, discretize_values, Range};
pub use kmeans::{kmeans, kmeans_points, KMeans, KMeansOptions};
pub use smote::{minority_majority, smote_rebalance, smote_rebalance_traced, SmoteParams, SyntheticRow};
