//! First-order methods as deterministic step rules.
//!
//! Every method is a [`Stepper`]: it owns the iterates and advances one
//! iteration per call. [`run`] drives a stepper into a [`Trace`], handling the
//! iteration budget, gradient-norm stopping and divergence detection.

mod adgd;
mod momentum;
mod tmm;

use crate::error::{Error, Result};
use crate::estimators;
use crate::objective::Objective;
use crate::rng;
use crate::trace::{IterationRecord, Trace};
use crate::vecops;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

pub use momentum::momentum_coefficient;

/// Iterates whose norm or objective value exceed this abort the run.
pub const DIVERGENCE_LIMIT: f64 = 1e100;

/// Default multiplicative increase for backtracking line searches.
pub const BACKTRACK_FACTOR: f64 = 1.01;

/// Upper bound on backtracking trials per iteration.
pub const BACKTRACK_CAP: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Gd,
    Nag,
    Tmm,
    NagRestart,
    NagRestartBacktrack,
    Adgd,
    AdgdAccel,
    AdgdAccel2,
    #[serde(rename = "nagfree_fixedL")]
    NagFreeFixedL,
    #[serde(rename = "nagfree")]
    NagFree,
    #[serde(rename = "nagfree_backtrack")]
    NagFreeBacktrack,
    #[serde(rename = "nagfree_restart")]
    NagFreeRestart,
}

impl SolverKind {
    pub const ALL: [SolverKind; 12] = [
        SolverKind::Gd,
        SolverKind::Nag,
        SolverKind::Tmm,
        SolverKind::NagRestart,
        SolverKind::NagRestartBacktrack,
        SolverKind::Adgd,
        SolverKind::AdgdAccel,
        SolverKind::AdgdAccel2,
        SolverKind::NagFreeFixedL,
        SolverKind::NagFree,
        SolverKind::NagFreeBacktrack,
        SolverKind::NagFreeRestart,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Gd => "gd",
            SolverKind::Nag => "nag",
            SolverKind::Tmm => "tmm",
            SolverKind::NagRestart => "nag_restart",
            SolverKind::NagRestartBacktrack => "nag_restart_backtrack",
            SolverKind::Adgd => "adgd",
            SolverKind::AdgdAccel => "adgd_accel",
            SolverKind::AdgdAccel2 => "adgd_accel2",
            SolverKind::NagFreeFixedL => "nagfree_fixedL",
            SolverKind::NagFree => "nagfree",
            SolverKind::NagFreeBacktrack => "nagfree_backtrack",
            SolverKind::NagFreeRestart => "nagfree_restart",
        }
    }

    /// Whether the method draws from the seed. Deterministic methods give the
    /// same trace for every seed.
    pub fn is_randomized(self) -> bool {
        !matches!(
            self,
            SolverKind::Gd | SolverKind::Nag | SolverKind::Tmm | SolverKind::NagRestart
        )
    }

    pub fn description(self) -> &'static str {
        match self {
            SolverKind::Gd => "gradient descent with step 1/L̄",
            SolverKind::Nag => "Nesterov momentum with fixed (L̄, m̲)",
            SolverKind::Tmm => "triple momentum method with fixed (L̄, m̲)",
            SolverKind::NagRestart => "NAG with gradient restarts, fixed L̄",
            SolverKind::NagRestartBacktrack => "NAG with gradient restarts, backtracked L",
            SolverKind::Adgd => "adaptive gradient descent",
            SolverKind::AdgdAccel => "accelerated adaptive gradient descent (first variant)",
            SolverKind::AdgdAccel2 => "accelerated adaptive gradient descent (second variant)",
            SolverKind::NagFreeFixedL => "online m estimate, fixed L̄",
            SolverKind::NagFree => "online m and L estimates",
            SolverKind::NagFreeBacktrack => "online m estimate, backtracked L",
            SolverKind::NagFreeRestart => "online m and L estimates with periodic restarts",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SolverKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidSpec(format!("unknown solver {s:?}")))
    }
}

/// How the fixed-L̄ method chooses `m_t`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MPolicy {
    /// Running minimum of observed curvatures (with the `gamma` safeguard).
    #[default]
    Online,
    /// Constant `m_t`. Curvature is still measured and recorded.
    Pinned(f64),
    /// Piecewise-constant `m_t`: each `(t_j, μ_j)` applies from iteration `t_j`.
    Schedule(Vec<(usize, f64)>),
}

impl MPolicy {
    fn validate(&self) -> Result<()> {
        match self {
            MPolicy::Online => Ok(()),
            MPolicy::Pinned(v) if *v > 0.0 && v.is_finite() => Ok(()),
            MPolicy::Pinned(v) => Err(Error::InvalidSpec(format!("pinned m must be positive, got {v}"))),
            MPolicy::Schedule(s) => {
                if s.first().map(|p| p.0) != Some(0) {
                    return Err(Error::InvalidSpec("m schedule must start at iteration 0".into()));
                }
                if s.windows(2).any(|w| w[0].0 >= w[1].0) {
                    return Err(Error::InvalidSpec("m schedule starts must increase".into()));
                }
                if s.iter().any(|p| !(p.1 > 0.0)) {
                    return Err(Error::InvalidSpec("m schedule values must be positive".into()));
                }
                Ok(())
            }
        }
    }

    /// Value in force at iteration `t`, or `None` for [`MPolicy::Online`].
    pub fn at(&self, t: usize) -> Option<f64> {
        match self {
            MPolicy::Online => None,
            MPolicy::Pinned(v) => Some(*v),
            MPolicy::Schedule(s) => s.iter().take_while(|p| p.0 <= t).last().map(|p| p.1),
        }
    }
}

/// Kind-specific parameters. Unset bounds fall back to the objective's own.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SolverParams {
    /// Smoothness surrogate `L̄ ≥ L`.
    pub l_bar: Option<f64>,
    /// Strong-convexity lower bound. Zero selects the weakly convex NAG momentum `t/(t+3)`.
    pub m_lower: Option<f64>,
    /// Step-size override; implies `L̄ = 1/step` when `l_bar` is unset.
    pub step: Option<f64>,
    pub restart_period: Option<usize>,
    pub backtrack_factor: Option<f64>,
    /// Geometric safeguard on `m_t` decreases; 1 disables it.
    pub gamma: Option<f64>,
    /// Initial `m_0` for the fixed-L̄ method instead of the random probe.
    pub m0: Option<f64>,
    #[serde(default)]
    pub m_policy: MPolicy,
    /// Start from `y_0 = x_0 − ∇f(x_0)/L̄` instead of `y_0 = x_0`.
    #[serde(default)]
    pub warm_start: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSpec {
    pub kind: SolverKind,
    #[serde(default)]
    pub params: SolverParams,
    pub max_iters: usize,
    #[serde(default)]
    pub grad_tol: f64,
}

impl SolverSpec {
    pub fn new(kind: SolverKind, max_iters: usize) -> Self {
        Self {
            kind,
            params: SolverParams::default(),
            max_iters,
            grad_tol: 0.0,
        }
    }

    pub fn l_bar(mut self, v: f64) -> Self {
        self.params.l_bar = Some(v);
        self
    }

    pub fn m_lower(mut self, v: f64) -> Self {
        self.params.m_lower = Some(v);
        self
    }

    pub fn step(mut self, v: f64) -> Self {
        self.params.step = Some(v);
        self
    }

    pub fn restart_period(mut self, p: usize) -> Self {
        self.params.restart_period = Some(p);
        self
    }

    pub fn gamma(mut self, g: f64) -> Self {
        self.params.gamma = Some(g);
        self
    }

    pub fn m0(mut self, v: f64) -> Self {
        self.params.m0 = Some(v);
        self
    }

    pub fn m_policy(mut self, p: MPolicy) -> Self {
        self.params.m_policy = p;
        self
    }

    pub fn warm_start(mut self, on: bool) -> Self {
        self.params.warm_start = on;
        self
    }

    pub fn grad_tol(mut self, tol: f64) -> Self {
        self.grad_tol = tol;
        self
    }
}

/// Spec parameters after defaults and objective fallbacks are applied.
#[derive(Debug, Clone)]
pub(crate) struct Resolved {
    pub l_bar: Option<f64>,
    /// Multiplier applied to the gradient in the fixed-step descent.
    pub inv_l: Option<f64>,
    pub m_lower: Option<f64>,
    pub restart_period: Option<usize>,
    pub factor: f64,
    pub gamma: f64,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidSpec(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

fn resolve(spec: &SolverSpec, obj: &dyn Objective) -> Result<Resolved> {
    let p = &spec.params;
    let kind = spec.kind;
    if spec.max_iters == 0 {
        return Err(Error::InvalidSpec("max_iters must be positive".into()));
    }
    if !(spec.grad_tol >= 0.0) {
        return Err(Error::InvalidSpec("grad_tol must be nonnegative".into()));
    }
    let step = p.step.map(|s| positive("step", s)).transpose()?;
    let l_bar = match (p.l_bar, step) {
        (Some(l), _) => Some(positive("l_bar", l)?),
        (None, Some(s)) => Some(1.0 / s),
        (None, None) => obj.smoothness_bound().filter(|l| *l > 0.0),
    };
    let inv_l = step.or(l_bar.map(|l| 1.0 / l));
    let m_lower = p.m_lower.or_else(|| obj.strong_convexity_bound());
    if let Some(m) = m_lower {
        if !(m >= 0.0) || !m.is_finite() {
            return Err(Error::InvalidSpec(format!("m_lower must be nonnegative, got {m}")));
        }
        if let Some(l) = l_bar {
            if m > l {
                return Err(Error::InvalidSpec(format!("m_lower {m} exceeds l_bar {l}")));
            }
        }
    }
    let factor = p.backtrack_factor.unwrap_or(BACKTRACK_FACTOR);
    if !(factor > 1.0) || !factor.is_finite() {
        return Err(Error::InvalidSpec(format!(
            "backtrack_factor must exceed 1, got {factor}"
        )));
    }
    let gamma = p.gamma.unwrap_or(1.0);
    if !(gamma >= 1.0) || !gamma.is_finite() {
        return Err(Error::InvalidSpec(format!("gamma must be at least 1, got {gamma}")));
    }
    if let Some(m0) = p.m0 {
        positive("m0", m0)?;
    }
    p.m_policy.validate()?;
    let need = |what: &str, ok: bool| {
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!("{kind} requires {what}")))
        }
    };
    match kind {
        SolverKind::Gd | SolverKind::NagRestart | SolverKind::NagFreeFixedL => need("l_bar", l_bar.is_some())?,
        SolverKind::Nag => {
            need("l_bar", l_bar.is_some())?;
            need("m_lower", m_lower.is_some())?;
        }
        SolverKind::Tmm => {
            need("l_bar", l_bar.is_some())?;
            need("positive m_lower", m_lower.is_some_and(|m| m > 0.0))?;
        }
        SolverKind::NagFreeRestart => need("restart_period >= 1", p.restart_period.is_some_and(|r| r >= 1))?,
        _ => {}
    }
    if p.warm_start && kind != SolverKind::NagFreeFixedL {
        return Err(Error::InvalidSpec("warm_start applies to nagfree_fixedL only".into()));
    }
    if !matches!(p.m_policy, MPolicy::Online) && kind != SolverKind::NagFreeFixedL {
        return Err(Error::InvalidSpec("m_policy applies to nagfree_fixedL only".into()));
    }
    Ok(Resolved {
        l_bar,
        inv_l,
        m_lower,
        restart_period: p.restart_period,
        factor,
        gamma,
    })
}

/// Telemetry for the current iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snapshot {
    pub f_x: f64,
    pub f_y: f64,
    pub grad_norm: f64,
    pub c: Option<f64>,
    pub m: Option<f64>,
    pub l: Option<f64>,
    pub restarted: bool,
}

/// One method's iteration state.
pub trait Stepper {
    /// The output iterate `x_t`.
    fn x(&self) -> &[f64];
    /// The descent iterate `y_t` (equal to `x_t` for methods without one).
    fn y(&self) -> &[f64];
    fn snapshot(&self) -> Snapshot;
    /// Advances from `t` to `t+1`.
    fn step(&mut self);
    /// Momentum coefficient used by the most recent step.
    fn last_momentum(&self) -> f64 {
        0.0
    }
}

/// Builds the stepper for `spec`, positioned at `t = 0`.
pub fn stepper<'a>(spec: &SolverSpec, obj: &'a dyn Objective, x0: &[f64], seed: u64) -> Result<Box<dyn Stepper + 'a>> {
    if x0.len() != obj.dim() {
        return Err(Error::Shape(format!(
            "x0 has length {}, objective has dim {}",
            x0.len(),
            obj.dim()
        )));
    }
    if !vecops::all_finite(x0) {
        return Err(Error::NonFiniteInput);
    }
    let r = resolve(spec, obj)?;
    let mut init_rng = rng::stream(seed, 0x1);
    let mut probe = || estimators::init_estimate(obj, x0, &mut init_rng);
    use momentum::{Descent, Momentum, MomentumMethod, Restart, Rules};
    let rules = match spec.kind {
        SolverKind::Tmm => {
            return Ok(Box::new(tmm::Tmm::new(
                obj,
                x0,
                r.l_bar.expect("resolved"),
                r.m_lower.expect("resolved"),
            )))
        }
        SolverKind::Adgd | SolverKind::AdgdAccel | SolverKind::AdgdAccel2 => {
            let variant = match spec.kind {
                SolverKind::Adgd => adgd::Variant::Plain,
                SolverKind::AdgdAccel => adgd::Variant::Accel,
                _ => adgd::Variant::Accel2,
            };
            let lambda0 = 1.0 / probe()?;
            return Ok(Box::new(adgd::Adgd::new(obj, x0, lambda0, variant)));
        }
        SolverKind::Gd => Rules {
            descent: Descent::Fixed(r.inv_l.expect("resolved")),
            momentum: Momentum::Zero,
            ..Rules::default()
        },
        SolverKind::Nag => {
            let l = r.l_bar.expect("resolved");
            let m = r.m_lower.expect("resolved");
            Rules {
                descent: Descent::Fixed(r.inv_l.expect("resolved")),
                momentum: if m > 0.0 {
                    Momentum::Fixed(momentum_coefficient(l, m))
                } else {
                    Momentum::Counter
                },
                ..Rules::default()
            }
        }
        SolverKind::NagRestart => Rules {
            descent: Descent::Fixed(r.inv_l.expect("resolved")),
            momentum: Momentum::Counter,
            restart: Restart::Gradient,
            ..Rules::default()
        },
        SolverKind::NagRestartBacktrack => Rules {
            descent: Descent::Backtrack(r.factor),
            momentum: Momentum::Counter,
            restart: Restart::Gradient,
            l0: Some(probe()?),
            ..Rules::default()
        },
        SolverKind::NagFreeFixedL => {
            let m0 = match (spec.params.m0, spec.params.m_policy.at(0)) {
                (Some(v), _) => v,
                (None, Some(v)) => v,
                (None, None) => probe()?,
            };
            Rules {
                descent: Descent::Fixed(r.inv_l.expect("resolved")),
                momentum: Momentum::Estimate,
                m0: Some(m0),
                m_policy: spec.params.m_policy.clone(),
                gamma: r.gamma,
                l0: r.l_bar,
                warm_start: spec.params.warm_start,
                ..Rules::default()
            }
        }
        SolverKind::NagFree | SolverKind::NagFreeBacktrack | SolverKind::NagFreeRestart => {
            let c0 = probe()?;
            let descent = if spec.kind == SolverKind::NagFreeBacktrack {
                Descent::Backtrack(r.factor)
            } else {
                Descent::Estimated
            };
            Rules {
                descent,
                momentum: Momentum::Estimate,
                m0: Some(c0),
                l0: Some(c0),
                gamma: r.gamma,
                track_l: spec.kind != SolverKind::NagFreeBacktrack,
                restart: match spec.kind {
                    SolverKind::NagFreeRestart => Restart::Periodic(r.restart_period.expect("resolved")),
                    _ => Restart::None,
                },
                ..Rules::default()
            }
        }
    };
    Ok(Box::new(MomentumMethod::new(obj, x0, rules)))
}

fn exploded(x: &[f64], snap: &Snapshot) -> bool {
    let xn = vecops::norm(x);
    !(xn <= DIVERGENCE_LIMIT) || !(snap.f_x.abs() <= DIVERGENCE_LIMIT) || !snap.grad_norm.is_finite()
}

fn record(t: usize, s: &Snapshot) -> IterationRecord {
    IterationRecord {
        t,
        f_x: s.f_x,
        f_y: s.f_y,
        grad_norm: s.grad_norm,
        c_t: s.c,
        m_t: s.m,
        l_t: s.l,
        restarted: s.restarted,
    }
}

/// Runs `spec` from `x0`. Records `t = 0` and one record per iteration, so a
/// full budget yields `max_iters + 1` records.
///
/// A run stops early only when `grad_tol > 0` and the gradient norm reaches
/// it. An exploding or non-finite iterate ends the run with
/// [`Trace::diverged`] set; the offending iterate is not recorded.
pub fn run(spec: &SolverSpec, obj: &dyn Objective, x0: &[f64], seed: u64) -> Result<Trace> {
    run_named(spec, obj, x0, seed, "")
}

pub fn run_named(spec: &SolverSpec, obj: &dyn Objective, x0: &[f64], seed: u64, problem_id: &str) -> Result<Trace> {
    let start = Instant::now();
    let mut trace = Trace::new(spec.kind.name(), problem_id, seed);
    let mut s = stepper(spec, obj, x0, seed)?;
    let mut t = 0;
    loop {
        let snap = s.snapshot();
        if exploded(s.x(), &snap) {
            trace.diverged = true;
            break;
        }
        trace.records.push(record(t, &snap));
        if trace.converged_at.is_none() && snap.grad_norm <= spec.grad_tol {
            trace.converged_at = Some(t);
            if spec.grad_tol > 0.0 {
                break;
            }
        }
        if t == spec.max_iters {
            break;
        }
        s.step();
        t += 1;
    }
    if trace.records.is_empty() {
        return Err(Error::NonFiniteOracle);
    }
    trace.wall_time = start.elapsed().as_secs_f64();
    Ok(trace)
}

/// Fixed-step method tried by [`grid_search_step`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridMethod {
    Gd,
    /// NAG with the weakly convex momentum `t/(t+3)`.
    NagWeak,
}

/// Picks the step size with the lowest final objective after `budget`
/// iterations of gradient descent. See [`grid_search_step_with`].
pub fn grid_search_step(obj: &dyn Objective, x0: &[f64], candidates: &[f64], budget: usize) -> Result<f64> {
    grid_search_step_with(obj, x0, candidates, budget, GridMethod::Gd)
}

/// A candidate is discarded when its run diverges or ends above `f(x0)`.
/// Ties go to the smaller step.
pub fn grid_search_step_with(
    obj: &dyn Objective,
    x0: &[f64],
    candidates: &[f64],
    budget: usize,
    method: GridMethod,
) -> Result<f64> {
    if candidates.is_empty() {
        return Err(Error::InvalidSpec("no candidate steps".into()));
    }
    let f0 = obj.value(x0);
    let mut best: Option<(f64, f64)> = None;
    for &step in candidates {
        let spec = match method {
            GridMethod::Gd => SolverSpec::new(SolverKind::Gd, budget).step(step),
            GridMethod::NagWeak => SolverSpec::new(SolverKind::Nag, budget).step(step).m_lower(0.0),
        };
        let trace = run(&spec, obj, x0, 0)?;
        let Some(f) = trace.final_value() else { continue };
        if trace.diverged || !f.is_finite() || f > f0 {
            continue;
        }
        let better = match best {
            None => true,
            Some((bf, bs)) => f < bf || (f == bf && step < bs),
        };
        if better {
            best = Some((f, step));
        }
    }
    best.map(|b| b.1).ok_or(Error::NoStableStep)
}

/// The logarithmic grid `{2^k / L̂ : k = −4..=4}`.
pub fn default_step_grid(l_hat: f64) -> Vec<f64> {
    (-4..=4).map(|k| 2f64.powi(k) / l_hat).collect()
}

/// Most halvings below [`default_step_grid`] tried by [`grid_search_around`].
pub const GRID_EXTENSION: i32 = 60;

/// Searches [`default_step_grid`]; if every candidate fails, keeps halving
/// below it until some step is stable, then picks the best of that step and
/// the two below it. A curvature probe at `x0` can underestimate the
/// curvature met along the path (cubic terms, for instance), which is what
/// the extension covers.
pub fn grid_search_around(
    obj: &dyn Objective,
    x0: &[f64],
    l_hat: f64,
    budget: usize,
    method: GridMethod,
) -> Result<f64> {
    match grid_search_step_with(obj, x0, &default_step_grid(l_hat), budget, method) {
        Err(Error::NoStableStep) => {}
        other => return other,
    }
    for k in 5..=GRID_EXTENSION {
        let step = 2f64.powi(-k) / l_hat;
        if grid_search_step_with(obj, x0, &[step], budget, method).is_ok() {
            let candidates = [step, step / 2.0, step / 4.0];
            return grid_search_step_with(obj, x0, &candidates, budget, method);
        }
    }
    Err(Error::NoStableStep)
}

#[cfg(test)]
mod tests;
