//! Lyapunov functions on the state `s_t = (x_t, y_t)`, all measured against
//! the objective's reference optimum:
//!
//! ```text
//! W(s)     = f̃(y) + (m/2)‖z − x*‖²,   z = x + √κ̄(x − y)
//! U(s)     = f̃(y) + (L̄/2)‖y − x*‖²
//! V^GD_t   = W + (ᾱ_{t−1}/√κ̄)·U
//! V^NAG_t  = f̃(y) + (m_{t−1}/2)‖w − x*‖²,   w = x + √κ̄_{t−1}(x − y)
//! ```
//!
//! with `f̃ = f − f*`.

use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::vecops;

fn excess_and_star<'a, O: Objective + ?Sized>(obj: &'a O, y: &[f64]) -> Result<(f64, &'a [f64])> {
    let gt = obj.ground_truth().ok_or(Error::NoReferenceOptimum)?;
    Ok((obj.value(y) - gt.f_star, &gt.x_star))
}

fn pseudo_state_dist_sq(x: &[f64], y: &[f64], weight: f64, x_star: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .zip(x_star)
        .map(|((xi, yi), si)| {
            let z = xi + weight * (xi - yi) - si;
            z * z
        })
        .sum()
}

/// `W(x, y)` with strong-convexity parameter `m` and `κ̄ = L̄/m`.
pub fn lyapunov_w<O: Objective + ?Sized>(obj: &O, x: &[f64], y: &[f64], m: f64, kappa_bar: f64) -> Result<f64> {
    let (excess, star) = excess_and_star(obj, y)?;
    Ok(excess + 0.5 * m * pseudo_state_dist_sq(x, y, kappa_bar.sqrt(), star))
}

/// `U(y) = f̃(y) + (L̄/2)‖y − x*‖²`.
pub fn lyapunov_u<O: Objective + ?Sized>(obj: &O, y: &[f64], l_bar: f64) -> Result<f64> {
    let (excess, star) = excess_and_star(obj, y)?;
    Ok(excess + 0.5 * l_bar * vecops::dist(y, star).powi(2))
}

/// `V^GD = W + (ᾱ/√κ̄)·U`; see [`alpha_bar`] for the weight.
pub fn lyapunov_vgd<O: Objective + ?Sized>(
    obj: &O,
    x: &[f64],
    y: &[f64],
    m: f64,
    l_bar: f64,
    alpha_bar: f64,
) -> Result<f64> {
    let kappa_bar = l_bar / m;
    Ok(lyapunov_w(obj, x, y, m, kappa_bar)? + alpha_bar / kappa_bar.sqrt() * lyapunov_u(obj, y, l_bar)?)
}

/// `V^NAG` at a step whose previous estimate was `m_prev`.
pub fn lyapunov_vnag<O: Objective + ?Sized>(obj: &O, x: &[f64], y: &[f64], m_prev: f64, l_bar: f64) -> Result<f64> {
    lyapunov_w(obj, x, y, m_prev, l_bar / m_prev)
}

/// `ᾱ = 1 − β/θ` for a momentum `β` relative to the NAG coefficient `θ`.
pub fn alpha_bar(beta: f64, theta: f64) -> f64 {
    1.0 - beta / theta
}

/// `δ^GD = 1/(κ̄−1)`.
pub fn delta_gd(kappa_bar: f64) -> f64 {
    1.0 / (kappa_bar - 1.0)
}

/// `δ^NAG = 1/(√κ̄−1)`.
pub fn delta_nag(kappa_bar: f64) -> f64 {
    1.0 / (kappa_bar.sqrt() - 1.0)
}
