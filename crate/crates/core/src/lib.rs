//! Density estimation with fixed-grid Gaussian mixtures.
//!
//! The grid model places many evenly spaced Gaussian components over the data
//! range with one shared scale and learns only the mixing weights, in a single
//! pass over the data. A legacy incremental learner and a classical EM
//! baseline are included for comparison, together with the Interval
//! Probability Error (IPE) metric and a seeded benchmark harness.
//!
//! ```
//! use gmm_expansion::learners::{build_grid, fit_one_iteration, OneIterationMode};
//!
//! let data = [0.1, 0.4, 0.45, 0.5, 0.9, 1.3];
//! let scaffold = build_grid(&data, 20, 3.0).unwrap();
//! let model = fit_one_iteration(&scaffold, &data, OneIterationMode::Approximate).unwrap();
//! assert!((model.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod cli;
pub mod error;
pub mod learners;
pub mod metrics;
pub mod model;
pub mod special;
pub mod synth;

pub use error::{Error, Result};
pub use model::{FreeGmm, GridGmm, IntervalProbability, ModelFile, Partition, TargetMixture};
