//! Effective curvature `c(x,y) = ‖∇f(x) − ∇f(y)‖/‖x − y‖` and the running
//! estimates of `m` and `L` built from it.

use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::rng;
use crate::vecops;
use rand::Rng;

/// Relative displacement below which a curvature sample is discarded.
pub const DEN_TOL: f64 = 1e-14;

/// Redraws allowed when initialising from a random probe.
pub const INIT_ATTEMPTS: usize = 5;

/// Width of the uniform probe box around `x0`.
pub const INIT_RADIUS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureEstimate<'a> {
    /// `None` when the displacement was too small to divide by.
    pub value: Option<f64>,
    pub x_new: &'a [f64],
    pub x_old: &'a [f64],
    pub displacement_norm: f64,
}

pub fn effective_curvature<'a>(
    x1: &'a [f64],
    g1: &[f64],
    x0: &'a [f64],
    g0: &[f64],
    den_tol: f64,
) -> Result<CurvatureEstimate<'a>> {
    if x1.len() != x0.len() || g1.len() != x1.len() || g0.len() != x0.len() {
        return Err(Error::Shape("curvature inputs differ in length".into()));
    }
    if ![x1, g1, x0, g0].iter().all(|v| vecops::all_finite(v)) {
        return Err(Error::NonFiniteInput);
    }
    let dx = vecops::dist(x1, x0);
    let value = if dx <= den_tol * (1.0 + vecops::norm(x1)) {
        None
    } else {
        Some(vecops::dist(g1, g0) / dx)
    };
    Ok(CurvatureEstimate {
        value,
        x_new: x1,
        x_old: x0,
        displacement_norm: dx,
    })
}

/// `c(x1, x0)` or `None` on a degenerate or non-finite sample. The solvers'
/// hot path.
#[inline]
pub fn curvature(x1: &[f64], g1: &[f64], x0: &[f64], g0: &[f64]) -> Option<f64> {
    effective_curvature(x1, g1, x0, g0, DEN_TOL).ok()?.value
}

/// `m_{t+1}` from `m_t` and a fresh sample `c`.
///
/// With `gamma = 1` this is `min(m_t, c)`. With `gamma > 1` every decrease
/// is by at least a factor `gamma`: `min(c, m_t/γ)` when `c < m_t`.
#[inline]
pub fn next_m(m: f64, c: f64, gamma: f64) -> f64 {
    if gamma <= 1.0 {
        m.min(c)
    } else if c < m {
        c.min(m / gamma)
    } else {
        m
    }
}

#[inline]
pub fn next_l(l: f64, c: f64) -> f64 {
    l.max(c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorState {
    pub m: f64,
    pub l: f64,
    pub gamma: f64,
    pub last_x: Vec<f64>,
    pub last_g: Vec<f64>,
}

impl EstimatorState {
    pub fn new(m0: f64, l0: f64, gamma: f64, x: Vec<f64>, g: Vec<f64>) -> Self {
        Self {
            m: m0,
            l: l0,
            gamma,
            last_x: x,
            last_g: g,
        }
    }

    pub fn update_m(mut self, c: f64) -> Self {
        self.m = next_m(self.m, c, self.gamma);
        self
    }

    pub fn update_l(mut self, c: f64) -> Self {
        self.l = next_l(self.l, c);
        self
    }

    /// Samples curvature against the stored point, updates both estimates,
    /// and stores `(x, g)` as the new reference. Degenerate samples leave the
    /// estimates untouched.
    pub fn observe(&mut self, x: &[f64], g: &[f64]) -> Result<Option<f64>> {
        let c = effective_curvature(x, g, &self.last_x, &self.last_g, DEN_TOL)?.value;
        if let Some(c) = c {
            self.m = next_m(self.m, c, self.gamma);
            self.l = next_l(self.l, c);
        }
        self.last_x.copy_from_slice(x);
        self.last_g.copy_from_slice(g);
        Ok(c)
    }
}

/// `c(x0, y)` for `y` drawn uniformly from `x0 + [0, 1e-6]^d`.
///
/// Degenerate or zero-curvature probes are redrawn up to
/// [`INIT_ATTEMPTS`] times in total, after which the objective's smoothness
/// bound is used if it has one.
pub fn init_estimate<O: Objective + ?Sized>(obj: &O, x0: &[f64], rng: &mut impl Rng) -> Result<f64> {
    if x0.len() != obj.dim() {
        return Err(Error::Shape(format!(
            "x0 has length {}, objective has dim {}",
            x0.len(),
            obj.dim()
        )));
    }
    let g0 = obj.gradient(x0);
    if !vecops::all_finite(&g0) {
        return Err(Error::NonFiniteOracle);
    }
    for _ in 0..INIT_ATTEMPTS {
        let offset = rng::uniform_vec(rng, x0.len(), 0.0, INIT_RADIUS);
        let y = vecops::add(x0, &offset);
        let gy = obj.gradient(&y);
        if let Some(c) = curvature(&y, &gy, x0, &g0) {
            if c > 0.0 && c.is_finite() {
                return Ok(c);
            }
        }
    }
    obj.smoothness_bound()
        .filter(|l| *l > 0.0)
        .ok_or(Error::CannotInitialize)
}
