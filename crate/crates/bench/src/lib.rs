//! Experiment harness for `nagfree-core`: problem registry, multi-seed runs
//! with mean/min/max aggregation, CSV and JSON export, SVG plots, the
//! numbered acceptance checks and the `nagfree` command line.
//!
//! ```no_run
//! use nagfree_bench::experiment::{run_experiment, ExperimentConfig};
//! use nagfree_bench::problem::ProblemConfig;
//! use nagfree_core::solvers::{SolverKind, SolverSpec};
//!
//! let problem = ProblemConfig::default_for("logsumexp").unwrap();
//! let solvers = vec![SolverSpec::new(SolverKind::NagFree, 500), SolverSpec::new(SolverKind::Adgd, 500)];
//! let result = run_experiment(&ExperimentConfig::new(problem, solvers, 500)).unwrap();
//! nagfree_bench::export::write_all(&result, "out".as_ref()).unwrap();
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod criteria;
pub mod error;
pub mod experiment;
pub mod export;
pub mod plot;
pub mod problem;

pub use error::{Error, Result};
pub use experiment::{
    run_experiment, run_experiment_with, AggregatedSeries, ExperimentConfig, ExperimentResult, Metric,
};
pub use problem::{ProblemConfig, X0Rule};
