//! The differentiable-function oracle shared by every solver, plus the two
//! checks that apply to any oracle: central-difference gradient verification
//! and suboptimality against a known optimum.

use crate::error::{Error, Result};
use crate::vecops;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Known optimum of an objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub f_star: f64,
    pub x_star: Vec<f64>,
}

/// A differentiable function oracle.
///
/// Implementations hold no interior mutability, so a single instance can be
/// evaluated from many concurrent runs.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// Writes `∇f(x)` into `out` (`out.len() == dim`).
    fn gradient_into(&self, x: &[f64], out: &mut [f64]);

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim()];
        self.gradient_into(x, &mut g);
        g
    }

    /// Upper bound `L̄ ≥ L` on the smoothness constant, when one is known.
    fn smoothness_bound(&self) -> Option<f64> {
        None
    }

    /// Lower bound on the strong-convexity constant, when one is known.
    fn strong_convexity_bound(&self) -> Option<f64> {
        None
    }

    fn ground_truth(&self) -> Option<&GroundTruth> {
        None
    }

    /// Hessian eigenvalues in ascending order, for objectives built from a spectrum.
    fn spectrum(&self) -> Option<&[f64]> {
        None
    }
}

impl<T: Objective + ?Sized> Objective for Arc<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        (**self).gradient_into(x, out)
    }
    fn smoothness_bound(&self) -> Option<f64> {
        (**self).smoothness_bound()
    }
    fn strong_convexity_bound(&self) -> Option<f64> {
        (**self).strong_convexity_bound()
    }
    fn ground_truth(&self) -> Option<&GroundTruth> {
        (**self).ground_truth()
    }
    fn spectrum(&self) -> Option<&[f64]> {
        (**self).spectrum()
    }
}

impl<T: Objective + ?Sized> Objective for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        (**self).gradient_into(x, out)
    }
    fn smoothness_bound(&self) -> Option<f64> {
        (**self).smoothness_bound()
    }
    fn strong_convexity_bound(&self) -> Option<f64> {
        (**self).strong_convexity_bound()
    }
    fn ground_truth(&self) -> Option<&GroundTruth> {
        (**self).ground_truth()
    }
    fn spectrum(&self) -> Option<&[f64]> {
        (**self).spectrum()
    }
}

/// Attaches an externally computed optimum (e.g. from a long reference run)
/// to an objective that has no closed-form one.
pub struct WithReference<O> {
    inner: O,
    truth: GroundTruth,
}

impl<O: Objective> WithReference<O> {
    pub fn new(inner: O, truth: GroundTruth) -> Self {
        Self { inner, truth }
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }
}

impl<O: Objective> Objective for WithReference<O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.inner.value(x)
    }
    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        self.inner.gradient_into(x, out)
    }
    fn smoothness_bound(&self) -> Option<f64> {
        self.inner.smoothness_bound()
    }
    fn strong_convexity_bound(&self) -> Option<f64> {
        self.inner.strong_convexity_bound()
    }
    fn ground_truth(&self) -> Option<&GroundTruth> {
        Some(&self.truth)
    }
    fn spectrum(&self) -> Option<&[f64]> {
        self.inner.spectrum()
    }
}

type ValueFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradFn = dyn Fn(&[f64], &mut [f64]) + Send + Sync;

/// Objective assembled from closures. Handy for one-off test functions.
pub struct FnObjective {
    dim: usize,
    value: Box<ValueFn>,
    grad: Box<GradFn>,
    smoothness: Option<f64>,
    truth: Option<GroundTruth>,
}

impl FnObjective {
    pub fn new(
        dim: usize,
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        grad: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            value: Box::new(value),
            grad: Box::new(grad),
            smoothness: None,
            truth: None,
        }
    }

    pub fn with_smoothness_bound(mut self, l_bar: f64) -> Self {
        self.smoothness = Some(l_bar);
        self
    }

    pub fn with_ground_truth(mut self, truth: GroundTruth) -> Self {
        self.truth = Some(truth);
        self
    }
}

impl Objective for FnObjective {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }
    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        (self.grad)(x, out)
    }
    fn smoothness_bound(&self) -> Option<f64> {
        self.smoothness
    }
    fn ground_truth(&self) -> Option<&GroundTruth> {
        self.truth.as_ref()
    }
}

/// Finite-difference step scaled to the point: `1e-6·(1 + ‖x‖∞)`.
pub fn default_fd_step(x: &[f64]) -> f64 {
    1e-6 * (1.0 + vecops::norm_inf(x))
}

/// Largest coordinate-wise disagreement between the analytic gradient and a
/// central difference, relative to `1 + |∂_i f(x)|`.
pub fn finite_difference_gradient_check<O: Objective + ?Sized>(obj: &O, x: &[f64], h: f64) -> Result<f64> {
    if !(h > 0.0) || !vecops::all_finite(x) {
        return Err(Error::NonFiniteInput);
    }
    let g = obj.gradient(x);
    if !vecops::all_finite(&g) {
        return Err(Error::NonFiniteOracle);
    }
    let mut probe = x.to_vec();
    let mut worst = 0.0_f64;
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let fp = obj.value(&probe);
        probe[i] = x[i] - h;
        let fm = obj.value(&probe);
        probe[i] = x[i];
        if !fp.is_finite() || !fm.is_finite() {
            return Err(Error::NonFiniteOracle);
        }
        let fd = (fp - fm) / (2.0 * h);
        worst = worst.max((fd - g[i]).abs() / (1.0 + g[i].abs()));
    }
    Ok(worst)
}

/// `f(x) − f*`, reported raw (it can dip below zero by rounding).
pub fn suboptimality<O: Objective + ?Sized>(obj: &O, x: &[f64]) -> Result<f64> {
    let truth = obj.ground_truth().ok_or(Error::NoReferenceOptimum)?;
    Ok(obj.value(x) - truth.f_star)
}
