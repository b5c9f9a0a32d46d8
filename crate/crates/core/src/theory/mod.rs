//! Closed-form objects from the convergence analysis: rates, the 2×2 modal
//! recurrence and its spectral radius, the suboptimality factors, the
//! Lyapunov functions and a simulator for the piecewise-LTI modal dynamics.
//!
//! On a quadratic with Hessian eigenvalues `λ_i`, each eigen-coordinate of the
//! fixed-`L̄` method obeys
//!
//! ```text
//! [x_{i,t}, x_{i,t+1}]ᵀ = G_i(m_t) [x_{i,t−1}, x_{i,t}]ᵀ,
//! G_i(s) = [[0, 1], [−β(s)(1−λ_i/L̄), (1+β(s))(1−λ_i/L̄)]]
//! ```
//!
//! so per-mode decay is governed by `ρ(s, λ_i)`, the larger eigenvalue modulus.

mod grid;
mod lyapunov;
mod modal;

pub use grid::{
    check_branch_law, check_curvature_identity, check_identities, check_lyapunov_descent, check_modal_equivalence,
    check_phi_decreasing, check_r_delta_forms, check_rho_below_r_delta, check_rho_ceiling, check_rho_monotone,
    check_threshold_law, verify_all, CheckResult,
};
pub use lyapunov::{alpha_bar, delta_gd, delta_nag, lyapunov_u, lyapunov_vgd, lyapunov_vnag, lyapunov_w};
pub use modal::{curvature_from_modes, modal_simulate, ModalSystem};

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Domain(msg()))
    }
}

/// Gradient-descent rate `(z−1)/z`.
pub fn r_gd(z: f64) -> Result<f64> {
    ensure(z >= 1.0 && z.is_finite(), || format!("r_gd needs z ≥ 1, got {z}"))?;
    Ok((z - 1.0) / z)
}

/// Accelerated rate `(√z−1)/√z`.
pub fn r_acc(z: f64) -> Result<f64> {
    ensure(z >= 1.0 && z.is_finite(), || format!("r_acc needs z ≥ 1, got {z}"))?;
    let r = z.sqrt();
    Ok((r - 1.0) / r)
}

fn check_s(s: f64, l_bar: f64) -> Result<()> {
    ensure(l_bar > 0.0 && l_bar.is_finite(), || {
        format!("L̄ must be positive, got {l_bar}")
    })?;
    ensure(s > 0.0 && s <= l_bar, || {
        format!("need 0 < s ≤ L̄, got s = {s}, L̄ = {l_bar}")
    })
}

fn check_ell(ell: f64, l_bar: f64) -> Result<()> {
    ensure((0.0..=l_bar).contains(&ell), || {
        format!("need 0 ≤ ℓ ≤ L̄, got ℓ = {ell}, L̄ = {l_bar}")
    })
}

/// Momentum map `β(s) = (√L̄−√s)/(√L̄+√s)`.
pub fn beta(l_bar: f64, s: f64) -> Result<f64> {
    check_s(s, l_bar)?;
    Ok(crate::solvers::momentum_coefficient(l_bar, s))
}

/// Modal system matrix for eigenvalue `lambda` under estimate `s`.
pub fn g_matrix(lambda: f64, l_bar: f64, s: f64) -> Result<[[f64; 2]; 2]> {
    check_s(s, l_bar)?;
    ensure(lambda > 0.0 && lambda <= l_bar, || {
        format!("need 0 < λ ≤ L̄, got λ = {lambda}")
    })?;
    let b = crate::solvers::momentum_coefficient(l_bar, s);
    let a = 1.0 - lambda / l_bar;
    Ok([[0.0, 1.0], [-b * a, (1.0 + b) * a]])
}

/// Centre `(1+β)/2·(1−ℓ/L̄)`, discriminant `Δ` and `β(1−ℓ/L̄)` of the characteristic roots.
fn root_parts(s: f64, ell: f64, l_bar: f64) -> (f64, f64, f64) {
    let b = crate::solvers::momentum_coefficient(l_bar, s);
    let a = 1.0 - ell / l_bar;
    let half = 0.5 * (1.0 + b) * a;
    (half, half * half - b * a, b * a)
}

fn complex_branch(s: f64, ell: f64, l_bar: f64) -> bool {
    s < ell && ell < l_bar
}

/// Eigenvalues `(ζ, ξ)` of [`g_matrix`] with `|ζ| ≥ |ξ|`.
///
/// The pair is complex exactly when `s < λ < L̄`; otherwise the discriminant
/// is clamped at zero so that `s = λ` yields a coincident real root.
pub fn g_eigenvalues(lambda: f64, l_bar: f64, s: f64) -> Result<(Complex64, Complex64)> {
    g_matrix(lambda, l_bar, s)?;
    let (half, disc, _) = root_parts(s, lambda, l_bar);
    Ok(if complex_branch(s, lambda, l_bar) {
        let im = (-disc).max(0.0).sqrt();
        (Complex64::new(half, im), Complex64::new(half, -im))
    } else {
        let r = disc.max(0.0).sqrt();
        (Complex64::new(half + r, 0.0), Complex64::new(half - r, 0.0))
    })
}

/// Spectral radius `ρ(s, ℓ)` of the modal recurrence.
pub fn rho(s: f64, ell: f64, l_bar: f64) -> Result<f64> {
    check_s(s, l_bar)?;
    check_ell(ell, l_bar)?;
    let (half, disc, prod) = root_parts(s, ell, l_bar);
    Ok(if complex_branch(s, ell, l_bar) {
        prod.max(0.0).sqrt()
    } else {
        half + disc.max(0.0).sqrt()
    })
}

/// Smaller eigenvalue modulus `ϱ(s, ℓ)`.
pub fn varrho(s: f64, ell: f64, l_bar: f64) -> Result<f64> {
    check_s(s, l_bar)?;
    check_ell(ell, l_bar)?;
    let (half, disc, prod) = root_parts(s, ell, l_bar);
    Ok(if complex_branch(s, ell, l_bar) {
        prod.max(0.0).sqrt()
    } else {
        (half - disc.max(0.0).sqrt()).abs()
    })
}

/// `φ(s, a, b) = min{1, ρ(s,a)/ρ(s,b)}`, or 1 when `ρ(s,b) = 0`.
pub fn phi(s: f64, a: f64, b: f64, l_bar: f64) -> Result<f64> {
    ensure(a > 0.0 && b > 0.0 && a != b, || {
        format!("φ needs distinct positive a, b; got {a}, {b}")
    })?;
    let rb = rho(s, b, l_bar)?;
    if rb == 0.0 {
        return Ok(1.0);
    }
    Ok((rho(s, a, l_bar)? / rb).min(1.0))
}

/// `r_δ(κ) = ρ((1+δ)m, m)` with `κ = L̄/m`, evaluated through the discriminant.
pub fn r_delta(delta: f64, kappa: f64) -> Result<f64> {
    ensure(delta > 0.0 && kappa >= 1.0 + delta, || {
        format!("r_δ needs δ > 0, κ ≥ 1+δ; got δ = {delta}, κ = {kappa}")
    })?;
    let (a, b) = (kappa.sqrt(), (1.0 + delta).sqrt());
    let bd = (a - b) / (a + b);
    let q = (kappa - 1.0) / kappa;
    let half = 0.5 * (1.0 + bd) * q;
    Ok(half + (half * half - bd * q).max(0.0).sqrt())
}

/// Factored form `√(κ−1)/√κ · (√(κ−1)+√δ)/(√κ+√(1+δ))` of [`r_delta`].
pub fn r_delta_factored(delta: f64, kappa: f64) -> Result<f64> {
    ensure(delta > 0.0 && kappa >= 1.0 + delta, || {
        format!("r_δ needs δ > 0, κ ≥ 1+δ; got δ = {delta}, κ = {kappa}")
    })?;
    let k1 = (kappa - 1.0).sqrt();
    Ok(k1 / kappa.sqrt() * (k1 + delta.sqrt()) / (kappa.sqrt() + (1.0 + delta).sqrt()))
}

fn check_phi_domain(delta_u: f64, delta_ell: f64, kappa: f64) -> Result<()> {
    ensure(delta_u > 0.0 && delta_ell > 0.0, || {
        format!("δ_u, δ_ℓ must be positive; got {delta_u}, {delta_ell}")
    })?;
    ensure(kappa >= 1.0 + delta_ell && kappa.is_finite(), || {
        format!("need κ ≥ 1+δ_ℓ, got κ = {kappa}")
    })
}

/// Upper bound `r_φ(δ_u, δ_ℓ, κ)` on the contraction of `φ`.
pub fn r_phi(delta_u: f64, delta_ell: f64, kappa: f64) -> Result<f64> {
    check_phi_domain(delta_u, delta_ell, kappa)?;
    let gap = kappa - (1.0 + delta_ell);
    let num = gap + (gap * delta_u * (1.0 + delta_ell)).sqrt();
    let den = kappa - 1.0 + ((kappa - 1.0) * (delta_u + delta_ell + delta_u * delta_ell)).sqrt();
    Ok(num / den)
}

/// `σ_φ = 1/((1−r_φ²)²κ)`, the factor with `r_φ² = r_acc(σ_φκ)`.
pub fn sigma_phi(delta_u: f64, delta_ell: f64, kappa: f64) -> Result<f64> {
    let r = r_phi(delta_u, delta_ell, kappa)?;
    let q = 1.0 - r * r;
    Ok(1.0 / (q * q * kappa))
}

/// Limit of [`sigma_phi`] as `κ → ∞`.
pub fn sigma_phi_limit(delta_u: f64, delta_ell: f64) -> Result<f64> {
    ensure(delta_u > 0.0 && delta_ell > 0.0, || {
        format!("δ_u, δ_ℓ must be positive; got {delta_u}, {delta_ell}")
    })?;
    let gap = (delta_u + delta_ell + delta_u * delta_ell).sqrt() - (delta_u * (1.0 + delta_ell)).sqrt();
    Ok(1.0 / (4.0 * gap * gap))
}

/// `σ_δ = 1 + 2δ + 2√(δ(1+δ))`: the smallest `σ` with `r_δ(κ) ≤ r_acc(σκ)`.
pub fn sigma_m(delta_m: f64) -> Result<f64> {
    ensure(delta_m >= 0.0 && delta_m.is_finite(), || {
        format!("δ must be nonnegative, got {delta_m}")
    })?;
    Ok(1.0 + 2.0 * delta_m + 2.0 * (delta_m * (1.0 + delta_m)).sqrt())
}

/// `δ_σ = (σ−1)²/(4σ)`, the inverse of [`sigma_m`].
pub fn delta_sigma_of(sigma: f64) -> Result<f64> {
    ensure(sigma > 1.0 && sigma.is_finite(), || {
        format!("σ must exceed 1, got {sigma}")
    })?;
    Ok((sigma - 1.0).powi(2) / (4.0 * sigma))
}

/// Precision parameters of the local analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryParams {
    pub gamma: f64,
    pub delta_m: f64,
    pub delta_u: f64,
    pub delta_ell: f64,
    pub delta_sigma: f64,
    pub sigma: f64,
    pub sigma_m: f64,
    pub sigma_phi: f64,
    pub omega: f64,
}

impl TheoryParams {
    /// Fills the derived fields from `(γ, δ_m, δ_u, ω)`: `δ_ℓ = (1+δ_m)/(1+δ_u) − 1`,
    /// `σ = σ_m = σ_{δ_m}`, `δ_σ = δ_{σ}` and `σ_φ` at its large-`κ` limit.
    pub fn from_precisions(gamma: f64, delta_m: f64, delta_u: f64, omega: f64) -> Result<Self> {
        ensure(delta_m > 0.0 && delta_u > 0.0, || "δ_m and δ_u must be positive".into())?;
        ensure(delta_u < delta_m.min(0.5), || {
            format!("need δ_u < min(δ_m, 1/2), got δ_u = {delta_u}")
        })?;
        let delta_ell = (1.0 + delta_m) / (1.0 + delta_u) - 1.0;
        let sm = sigma_m(delta_m)?;
        let p = Self {
            gamma,
            delta_m,
            delta_u,
            delta_ell,
            delta_sigma: delta_sigma_of(sm)?,
            sigma: sm,
            sigma_m: sm,
            sigma_phi: sigma_phi_limit(delta_u, delta_ell)?,
            omega,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.gamma >= 2.0, || {
            format!("γ must be at least 2, got {}", self.gamma)
        })?;
        for (name, v) in [
            ("δ_m", self.delta_m),
            ("δ_u", self.delta_u),
            ("δ_ℓ", self.delta_ell),
            ("δ_σ", self.delta_sigma),
        ] {
            ensure(v > 0.0 && v.is_finite(), || format!("{name} must be positive, got {v}"))?;
        }
        for (name, v) in [("σ", self.sigma), ("σ_m", self.sigma_m), ("σ_φ", self.sigma_phi)] {
            ensure(v > 1.0 && v.is_finite(), || format!("{name} must exceed 1, got {v}"))?;
        }
        ensure(self.omega >= 1.0, || {
            format!("ω must be at least 1, got {}", self.omega)
        })
    }
}

/// Iteration bound for `m_t` to enter `[m/γ, (1+δ_m)m]`.
///
/// `M_1` and `α_φ` are proof constants that cannot be computed from the
/// problem data, so they are taken as inputs; the result is a diagnostic.
pub fn tau_bound(params: &TheoryParams, kappa: f64, m1: f64, alpha_phi: f64, m: f64, r_prime: f64) -> Result<f64> {
    params.validate()?;
    ensure(m1 > 0.0 && alpha_phi > 0.0 && m > 0.0, || {
        "M_1, α_φ and m must be positive".into()
    })?;
    let floor = r_acc(sigma_phi(params.delta_u, params.delta_ell, kappa)? * kappa)?;
    ensure(r_prime > floor && r_prime < 1.0, || {
        format!("need r′ in ({floor}, 1), got {r_prime}")
    })?;
    let arg = 4.0 * kappa * kappa * m1 * params.omega / params.delta_u;
    ensure(arg > 1.0, || format!("4κ²M_1ω/δ_u must exceed 1, got {arg}"))?;
    let lead = -arg.ln() / r_prime.ln();
    let top = ((kappa / (1.0 + params.delta_m)).ln() / params.gamma.ln())
        .floor()
        .max(0.0) as i32;
    let sum: f64 = (0..=top)
        .map(|j| 1.0 / (1.0 + alpha_phi * m * (1.0 + params.delta_ell) * (params.gamma.powi(j) - 1.0)))
        .sum();
    Ok(lead * sum)
}
