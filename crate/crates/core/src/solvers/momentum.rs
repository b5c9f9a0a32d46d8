//! The descent-then-extrapolate family:
//!
//! ```text
//! y_{t+1} = x_t − ∇f(x_t)/L_t
//! x_{t+1} = y_{t+1} + β_t (y_{t+1} − y_t)
//! ```
//!
//! GD, NAG, the restart baselines and all online-estimate variants differ
//! only in how `L_t`, `β_t` and restarts are chosen, so they share this
//! engine. Sharing the arithmetic also makes the GD and NAG endpoints of the
//! online method reproduce those baselines bit for bit.

use super::{MPolicy, Snapshot, Stepper, BACKTRACK_CAP};
use crate::estimators::{self, next_l, next_m};
use crate::objective::Objective;
use crate::vecops;

/// `(√L − √s)/(√L + √s)`, which equals `(√κ − 1)/(√κ + 1)` for `κ = L/s`.
#[inline]
pub fn momentum_coefficient(l: f64, s: f64) -> f64 {
    let (a, b) = (l.sqrt(), s.sqrt());
    (a - b) / (a + b)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Descent {
    /// Multiply the gradient by this fixed `1/L̄`.
    Fixed(f64),
    /// Step `1/L_t` with `L_t` the running curvature maximum.
    Estimated,
    /// Increase `L_t` by the factor until sufficient decrease holds.
    Backtrack(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Momentum {
    Zero,
    Fixed(f64),
    /// `β(L_t, m_t)` from the current estimates.
    Estimate,
    /// `k/(k+3)` with `k` counting iterations since the last restart.
    Counter,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Restart {
    None,
    /// Reset when `⟨∇f(x_t), x_{t+1} − x_t⟩ > 0`.
    Gradient,
    /// Every `p` iterations reset `L = m = c` and `y = x`.
    Periodic(usize),
}

#[derive(Debug, Clone)]
pub(crate) struct Rules {
    pub descent: Descent,
    pub momentum: Momentum,
    pub restart: Restart,
    pub m0: Option<f64>,
    pub l0: Option<f64>,
    pub m_policy: MPolicy,
    pub gamma: f64,
    /// Apply `L ← max(L, c)` after each step.
    pub track_l: bool,
    pub warm_start: bool,
}

impl Default for Rules {
    fn default() -> Self {
        Self {
            descent: Descent::Estimated,
            momentum: Momentum::Zero,
            restart: Restart::None,
            m0: None,
            l0: None,
            m_policy: MPolicy::Online,
            gamma: 1.0,
            track_l: false,
            warm_start: false,
        }
    }
}

pub(crate) struct MomentumMethod<'a> {
    obj: &'a dyn Objective,
    rules: Rules,
    t: usize,
    k: usize,
    x: Vec<f64>,
    g: Vec<f64>,
    fx: f64,
    gnorm: f64,
    y: Vec<f64>,
    fy: f64,
    /// `L_t` for the next step; for fixed descent it mirrors `1/inv_l`.
    l: Option<f64>,
    m: Option<f64>,
    c: Option<f64>,
    beta: f64,
    restarted: bool,
}

impl<'a> MomentumMethod<'a> {
    pub fn new(obj: &'a dyn Objective, x0: &[f64], rules: Rules) -> Self {
        let g = obj.gradient(x0);
        let fx = obj.value(x0);
        let (y, fy) = match (rules.warm_start, rules.descent) {
            (true, Descent::Fixed(inv)) => {
                let y = vecops::step(x0, -inv, &g);
                let fy = obj.value(&y);
                (y, fy)
            }
            _ => (x0.to_vec(), fx),
        };
        let l = match rules.descent {
            Descent::Fixed(inv) => Some(rules.l0.unwrap_or(1.0 / inv)),
            _ => rules.l0,
        };
        let m = rules.m0;
        Self {
            obj,
            t: 0,
            k: 0,
            gnorm: vecops::norm(&g),
            x: x0.to_vec(),
            g,
            fx,
            y,
            fy,
            l,
            m,
            c: None,
            beta: 0.0,
            restarted: false,
            rules,
        }
    }

    /// Current `m_t`, honouring a pinned or scheduled policy.
    fn m_now(&self) -> Option<f64> {
        self.rules.m_policy.at(self.t).or(self.m)
    }

    /// `y = x − ∇f(x)/L`, backtracking on `L` when configured.
    fn descend(&mut self) -> (Vec<f64>, f64) {
        match self.rules.descent {
            Descent::Fixed(inv) => {
                let y = vecops::step(&self.x, -inv, &self.g);
                let fy = self.obj.value(&y);
                (y, fy)
            }
            Descent::Estimated => {
                let l = self.l.expect("estimated descent has L_0");
                let y = vecops::step(&self.x, -1.0 / l, &self.g);
                let fy = self.obj.value(&y);
                (y, fy)
            }
            Descent::Backtrack(factor) => {
                let mut l = self.l.expect("backtracking descent has L_0");
                let gsq = self.gnorm * self.gnorm;
                // Below these the sufficient-decrease test is rounding noise:
                // the required decrease is under f's resolution, or the step
                // is as short as a degenerate curvature sample.
                let resolution = 4.0 * f64::EPSILON * self.fx.abs();
                let min_step = estimators::DEN_TOL * (1.0 + vecops::norm(&self.x));
                let mut trials = 0;
                loop {
                    let y = vecops::step(&self.x, -1.0 / l, &self.g);
                    let fy = self.obj.value(&y);
                    let required = gsq / (2.0 * l);
                    let noise = required <= resolution || self.gnorm / l <= min_step;
                    if fy - self.fx <= -required || noise || trials >= BACKTRACK_CAP {
                        self.l = Some(l);
                        return (y, fy);
                    }
                    l *= factor;
                    trials += 1;
                }
            }
        }
    }

    fn coefficient(&self) -> f64 {
        match self.rules.momentum {
            Momentum::Zero => 0.0,
            Momentum::Fixed(b) => b,
            Momentum::Counter => self.k as f64 / (self.k as f64 + 3.0),
            Momentum::Estimate => {
                let l = self.l.expect("estimate momentum has L");
                let m = self.m_now().expect("estimate momentum has m");
                momentum_coefficient(l, m)
            }
        }
    }
}

impl Stepper for MomentumMethod<'_> {
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
            grad_norm: self.gnorm,
            c: self.c,
            m: self.m_now(),
            l: self.l,
            restarted: self.restarted,
        }
    }

    fn last_momentum(&self) -> f64 {
        self.beta
    }

    fn step(&mut self) {
        let (mut y_new, mut fy_new) = self.descend();
        let beta = self.coefficient();
        let x_new = vecops::extrapolate(&y_new, &self.y, beta);
        let g_new = self.obj.gradient(&x_new);
        let fx_new = self.obj.value(&x_new);
        let c = estimators::curvature(&x_new, &g_new, &self.x, &self.g);

        let mut restarted = false;
        let mut update_estimates = true;
        match self.rules.restart {
            Restart::None => {}
            Restart::Gradient => {
                let dx = vecops::sub(&x_new, &self.x);
                if vecops::dot(&self.g, &dx) > 0.0 {
                    self.k = 0;
                    y_new.clone_from(&x_new);
                    fy_new = fx_new;
                    restarted = true;
                } else {
                    self.k += 1;
                }
            }
            Restart::Periodic(p) => {
                if (self.t + 1).is_multiple_of(p) {
                    if let Some(c) = c {
                        self.l = Some(c);
                        self.m = Some(c);
                    }
                    y_new.clone_from(&x_new);
                    fy_new = fx_new;
                    restarted = true;
                    update_estimates = false;
                }
            }
        }
        if self.rules.momentum == Momentum::Counter && self.rules.restart == Restart::None {
            self.k += 1;
        }
        if let (true, Some(c)) = (update_estimates, c) {
            if let Some(m) = self.m {
                self.m = Some(next_m(m, c, self.rules.gamma));
            }
            if self.rules.track_l {
                self.l = self.l.map(|l| next_l(l, c));
            }
        }

        self.x = x_new;
        self.g = g_new;
        self.gnorm = vecops::norm(&self.g);
        self.fx = fx_new;
        self.y = y_new;
        self.fy = fy_new;
        self.c = c;
        self.beta = beta;
        self.restarted = restarted;
        self.t += 1;
    }
}
