//! Adaptive gradient descent and its two accelerated heuristics.
//!
//! Plain: `λ_k = min(√(1+θ_{k−1})·λ_{k−1}, 1/(√2·c_k))`, `x_{k+1} = x_k − λ_k∇f(x_k)`.
//!
//! Accel: step `λ_k = min(√(1+θ/2)·λ, 1/(2c_k))` and strong-convexity
//! estimate `Λ_k = min(√(1+Θ/2)·Λ, c_k/2)`, combined as
//! `y_{k+1} = x_k − λ_k∇f(x_k)`, `x_{k+1} = y_{k+1} + β_k(y_{k+1} − y_k)` with
//! `β_k = (1/√λ_k − √Λ_k)/(1/√λ_k + √Λ_k)`.
//!
//! Accel2: the same scheme with `√(1+θ)` growth and factor `1/√2` in place of `1/2`.

use super::{Snapshot, Stepper};
use crate::estimators;
use crate::objective::Objective;
use crate::vecops;
use std::f64::consts::SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Variant {
    Plain,
    Accel,
    Accel2,
}

pub(crate) struct Adgd<'a> {
    obj: &'a dyn Objective,
    variant: Variant,
    x: Vec<f64>,
    g: Vec<f64>,
    fx: f64,
    started: bool,
    y: Vec<f64>,
    fy: f64,
    lambda: f64,
    theta: f64,
    big_lambda: f64,
    big_theta: f64,
    c: Option<f64>,
    beta: f64,
}

impl<'a> Adgd<'a> {
    pub fn new(obj: &'a dyn Objective, x0: &[f64], lambda0: f64, variant: Variant) -> Self {
        let g = obj.gradient(x0);
        let fx = obj.value(x0);
        Self {
            obj,
            variant,
            x: x0.to_vec(),
            g,
            fx,
            started: false,
            y: x0.to_vec(),
            fy: fx,
            lambda: lambda0,
            theta: f64::INFINITY,
            big_lambda: 1.0 / lambda0,
            big_theta: f64::INFINITY,
            c: None,
            beta: 0.0,
        }
    }

    fn growth(&self, ratio: f64) -> f64 {
        if !ratio.is_finite() {
            return f64::INFINITY;
        }
        match self.variant {
            Variant::Accel => (1.0 + ratio / 2.0).sqrt(),
            Variant::Plain | Variant::Accel2 => (1.0 + ratio).sqrt(),
        }
    }

    /// Curvature multiplier: `1/√2` (plain, accel2) or `1/2` (accel).
    fn shrink(&self) -> f64 {
        match self.variant {
            Variant::Accel => 0.5,
            Variant::Plain | Variant::Accel2 => 1.0 / SQRT_2,
        }
    }

    fn update_steps(&mut self, c: Option<f64>) {
        let lam_cap = self.growth(self.theta) * self.lambda;
        let big_cap = self.growth(self.big_theta) * self.big_lambda;
        let (lam, big) = match c {
            Some(c) if c > 0.0 => (lam_cap.min(self.shrink() / c), big_cap.min(self.shrink() * c)),
            // No usable curvature: keep the previous values.
            _ => (self.lambda, self.big_lambda),
        };
        self.theta = lam / self.lambda;
        self.big_theta = big / self.big_lambda;
        self.lambda = lam;
        self.big_lambda = big;
    }
}

impl Stepper for Adgd<'_> {
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
            grad_norm: vecops::norm(&self.g),
            c: self.c,
            m: (self.variant != Variant::Plain).then_some(self.big_lambda),
            l: Some(1.0 / self.lambda),
            restarted: false,
        }
    }

    fn last_momentum(&self) -> f64 {
        self.beta
    }

    fn step(&mut self) {
        if self.started {
            self.update_steps(self.c);
        }
        let y_new = vecops::step(&self.x, -self.lambda, &self.g);
        let beta = match self.variant {
            Variant::Plain => 0.0,
            Variant::Accel | Variant::Accel2 => {
                let (a, b) = ((1.0 / self.lambda).sqrt(), self.big_lambda.sqrt());
                ((a - b) / (a + b)).max(0.0)
            }
        };
        let x_new = vecops::extrapolate(&y_new, &self.y, beta);
        let g_new = self.obj.gradient(&x_new);
        self.c = estimators::curvature(&x_new, &g_new, &self.x, &self.g);
        self.fy = self.obj.value(&y_new);
        self.fx = self.obj.value(&x_new);
        self.x = x_new;
        self.g = g_new;
        self.started = true;
        self.y = y_new;
        self.beta = beta;
    }
}
