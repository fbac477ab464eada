//! Interpolated nearest-neighbor regression and classification.
//!
//! The estimator weights the `k` nearest training points by
//! `(R_i / R_{k+1})^{-γ}`, which reproduces training labels exactly at
//! training points for any `γ > 0` while staying consistent. `γ = 0` is
//! plain kNN.
//!
//! Besides the estimator the crate provides an exact kd-tree neighbor search,
//! closed-form asymptotic risk ratios against kNN, a Gaussian-mixture
//! benchmark with its Bayes rule, and a Monte-Carlo experiment harness.
//!
//! ```
//! use interpnn::{FittedModel, LabeledDataset, Task, WeightScheme};
//!
//! let train = LabeledDataset::new(
//!     vec![vec![0.0], vec![1.0], vec![3.0]],
//!     vec![0.0, 1.0, 0.0],
//!     Task::Regression,
//! )?;
//! let model = FittedModel::fit(train, WeightScheme::Interpolated { gamma: 0.5 }, 2)?;
//! assert_eq!(model.predict_regression(&[1.0])?, 1.0);
//! # Ok::<(), interpnn::Error>(())
//! ```

pub mod cli;
pub mod curve;
pub mod data;
pub mod error;
pub mod estimator;
pub mod experiments;
pub mod neighbors;
pub mod simgen;
pub mod stats;
pub mod theory;
pub mod weighting;

pub use data::{split_train_test, LabeledDataset, Point, RngSeed, Task};
pub use error::{Error, ErrorReport, Result, Violation};
pub use estimator::{EvalReport, FittedModel, Metric};
pub use neighbors::{brute_knn, NeighborIndex, NeighborList};
pub use simgen::{BayesOracle, MixtureModel};
pub use theory::AsymptoticParams;
pub use weighting::{compute_weights, WeightScheme, WeightVector};
