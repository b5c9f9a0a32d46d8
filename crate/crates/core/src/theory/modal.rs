use super::ensure;
use crate::error::Result;
use crate::solvers::momentum_coefficient;
use serde::{Deserialize, Serialize};

/// One eigen-coordinate of the fixed-`L̄` method under a piecewise-constant estimate schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalSystem {
    pub lambda: f64,
    pub l_bar: f64,
    /// `(t_j, μ_j)`: the estimate is `μ_j` for `t_j ≤ t < t_{j+1}`.
    pub m_schedule: Vec<(usize, f64)>,
}

impl ModalSystem {
    pub fn new(lambda: f64, l_bar: f64, m_schedule: Vec<(usize, f64)>) -> Result<Self> {
        let sys = Self {
            lambda,
            l_bar,
            m_schedule,
        };
        sys.validate()?;
        Ok(sys)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(
            self.l_bar > 0.0 && self.lambda > 0.0 && self.lambda <= self.l_bar,
            || format!("need 0 < λ ≤ L̄, got λ = {}, L̄ = {}", self.lambda, self.l_bar),
        )?;
        ensure(self.m_schedule.first().is_some_and(|&(t, _)| t == 0), || {
            "schedule must start at iteration 0".into()
        })?;
        for w in self.m_schedule.windows(2) {
            ensure(w[0].0 < w[1].0, || "schedule start iterations must increase".into())?;
            ensure(w[1].1 <= w[0].1, || "schedule values must be nonincreasing".into())?;
        }
        for &(_, mu) in &self.m_schedule {
            ensure(mu > 0.0 && mu <= self.l_bar, || {
                format!("schedule value {mu} outside (0, L̄]")
            })?;
        }
        Ok(())
    }

    fn estimate_at(&self, t: usize) -> f64 {
        let idx = self.m_schedule.partition_point(|&(start, _)| start <= t);
        self.m_schedule[idx - 1].1
    }
}

/// Iterates `X_{t+1} = G(m_t) X_t` from `X_0 = [x_0, x_0]`, returning `X_0..=X_T`.
///
/// Entry `t` is `[x_{t−1}, x_t]`, the coordinate of `x_t − x*` along the mode.
pub fn modal_simulate(system: &ModalSystem, x0_coord: f64, iters: usize) -> Result<Vec<[f64; 2]>> {
    system.validate()?;
    let a = 1.0 - system.lambda / system.l_bar;
    let mut out = Vec::with_capacity(iters + 1);
    let mut state = [x0_coord, x0_coord];
    out.push(state);
    for t in 0..iters {
        let b = momentum_coefficient(system.l_bar, system.estimate_at(t));
        let g = [[0.0, 1.0], [-b * a, (1.0 + b) * a]];
        state = [
            g[0][0] * state[0] + g[0][1] * state[1],
            g[1][0] * state[0] + g[1][1] * state[1],
        ];
        out.push(state);
    }
    Ok(out)
}

/// `√(Σ λ_i² w_i / Σ w_i)` with `w_i = diff_i²`: the effective curvature of a
/// quadratic along a displacement with eigen-coordinates `diffs`.
pub fn curvature_from_modes(lambdas: &[f64], diffs: &[f64]) -> Result<f64> {
    ensure(lambdas.len() == diffs.len(), || {
        format!("{} eigenvalues but {} differences", lambdas.len(), diffs.len())
    })?;
    let (mut num, mut den) = (0.0, 0.0);
    for (l, d) in lambdas.iter().zip(diffs) {
        let w = d * d;
        num += l * l * w;
        den += w;
    }
    ensure(den > 0.0, || "all coordinate differences are zero".into())?;
    Ok((num / den).sqrt())
}
