//! Triple momentum method with fixed `(L̄, m̲)`:
//!
//! ```text
//! ξ_{t+1} = (1+β)ξ_t − βξ_{t−1} − α∇f(y_t)
//! y_t     = (1+γ)ξ_t − γξ_{t−1}
//! x_t     = (1+δ)ξ_t − δξ_{t−1}
//! ```
//!
//! with `ρ = 1 − 1/√κ̄`, `α = (1+ρ)/L̄`, `β = ρ²/(2−ρ)`,
//! `γ = ρ²/((1+ρ)(2−ρ))`, `δ = ρ²/(1−ρ²)`.

use super::{Snapshot, Stepper};
use crate::estimators;
use crate::objective::Objective;
use crate::vecops;

pub(crate) struct Tmm<'a> {
    obj: &'a dyn Objective,
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    xi: Vec<f64>,
    xi_prev: Vec<f64>,
    x: Vec<f64>,
    gx: Vec<f64>,
    fx: f64,
    y: Vec<f64>,
    gy: Vec<f64>,
    fy: f64,
    c: Option<f64>,
}

impl<'a> Tmm<'a> {
    pub fn new(obj: &'a dyn Objective, x0: &[f64], l_bar: f64, m: f64) -> Self {
        let rho = 1.0 - (m / l_bar).sqrt();
        let gx = obj.gradient(x0);
        let fx = obj.value(x0);
        Self {
            obj,
            alpha: (1.0 + rho) / l_bar,
            beta: rho * rho / (2.0 - rho),
            gamma: rho * rho / ((1.0 + rho) * (2.0 - rho)),
            delta: rho * rho / (1.0 - rho * rho),
            xi: x0.to_vec(),
            xi_prev: x0.to_vec(),
            x: x0.to_vec(),
            gy: gx.clone(),
            gx,
            fx,
            y: x0.to_vec(),
            fy: fx,
            c: None,
        }
    }
}

impl Stepper for Tmm<'_> {
    fn x(&self) -> &[f64] {
        &self.x
    }

    fn y(&self) -> &[f64] {
        &self.y
    }

    fn snapshot(&self) -> Snapshot {
        Snapshot {
            f_x: self.fx,
            f_y: self.fy,
            grad_norm: vecops::norm(&self.gx),
            c: self.c,
            m: None,
            l: None,
            restarted: false,
        }
    }

    fn last_momentum(&self) -> f64 {
        self.beta
    }

    fn step(&mut self) {
        let mut xi_next = vecops::extrapolate(&self.xi, &self.xi_prev, self.beta);
        vecops::axpy(-self.alpha, &self.gy, &mut xi_next);
        self.xi_prev = std::mem::replace(&mut self.xi, xi_next);

        let x_new = vecops::extrapolate(&self.xi, &self.xi_prev, self.delta);
        let gx_new = self.obj.gradient(&x_new);
        self.c = estimators::curvature(&x_new, &gx_new, &self.x, &self.gx);
        self.fx = self.obj.value(&x_new);
        self.x = x_new;
        self.gx = gx_new;

        self.y = vecops::extrapolate(&self.xi, &self.xi_prev, self.gamma);
        self.gy = self.obj.gradient(&self.y);
        self.fy = self.obj.value(&self.y);
    }
}
