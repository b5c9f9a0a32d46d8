//! Accelerated first-order methods that estimate the strong-convexity
//! parameter online, together with standard baselines, a suite of test
//! objectives, and executable versions of the convergence theory.
//!
//! The central method replaces the unknown `m` in Nesterov's momentum
//! `(√L − √m)/(√L + √m)` by the running minimum `m_t` of the observed
//! effective curvatures `‖∇f(x_{t+1}) − ∇f(x_t)‖/‖x_{t+1} − x_t‖`.
//!
//! ```
//! use nagfree_core::problems::Quadratic;
//! use nagfree_core::solvers::{run, SolverKind, SolverSpec};
//!
//! let f = Quadratic::diagonal(&[1.0, 5.0, 1e4]).unwrap();
//! let spec = SolverSpec::new(SolverKind::NagFreeFixedL, 2000).l_bar(1e4);
//! let trace = run(&spec, &f, &[1.0, 1.0, 1.0], 1).unwrap();
//! assert!(trace.final_value().unwrap() < 1e-8);
//! ```

// Parameter checks are written as `!(x > 0.0)` on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimators;
pub mod exec;
pub mod linalg;
pub mod objective;
pub mod problems;
pub mod rng;
pub mod solvers;
pub mod theory;
pub mod trace;
pub mod vecops;

pub use error::{Error, Result};
pub use objective::{GroundTruth, Objective};
pub use solvers::{run, SolverKind, SolverParams, SolverSpec};
pub use trace::{IterationRecord, Trace};
