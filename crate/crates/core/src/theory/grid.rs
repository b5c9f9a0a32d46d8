//! Fixed-grid numerical checks of the analytical statements. Every grid is
//! enumerated here so results are reproducible without seeds.

use super::*;
use crate::objective::Objective;
use crate::problems::Quadratic;
use crate::solvers::{stepper, MPolicy, SolverKind, SolverSpec};
use crate::vecops;
use serde::Serialize;

/// Outcome of one check: `worst` is the largest observed excess of the
/// checked inequality or identity, to be compared against `tol`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    pub worst: f64,
    pub tol: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}

struct Tally {
    r: CheckResult,
}

impl Tally {
    fn new(name: &str, tol: f64) -> Self {
        Self {
            r: CheckResult {
                name: name.into(),
                cases: 0,
                failures: 0,
                worst: f64::NEG_INFINITY,
                tol,
            },
        }
    }

    /// Records `excess`, which passes when `≤ tol`.
    fn push(&mut self, excess: f64) {
        self.r.cases += 1;
        if excess.is_nan() || excess > self.r.tol {
            self.r.failures += 1;
        }
        if excess.is_nan() || excess > self.r.worst {
            self.r.worst = excess;
        }
    }

    fn push_result(&mut self, excess: Result<f64>) {
        self.push(excess.unwrap_or(f64::NAN));
    }

    fn done(self) -> CheckResult {
        self.r
    }
}

fn lin(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..=n).map(move |j| {
        if j == n {
            hi
        } else {
            lo + (hi - lo) * j as f64 / n as f64
        }
    })
}

/// Roots of `z² − tr·z + det` for a generic 2×2 matrix.
fn generic_eigenvalues(g: &[[f64; 2]; 2]) -> (Complex64, Complex64) {
    let tr = g[0][0] + g[1][1];
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let root = Complex64::new(tr * tr / 4.0 - det, 0.0).sqrt();
    (tr / 2.0 + root, tr / 2.0 - root)
}

/// Complex pair iff `s < ℓ < L̄`, and the top modulus equals `ρ`.
pub fn check_branch_law() -> CheckResult {
    let mut t = Tally::new("branch law and spectral radius", 1e-10);
    for l_bar in [1.0, 1e4] {
        for ks in 1..=10 {
            for kl in 1..=10 {
                let (s, ell) = (ks as f64 / 10.0 * l_bar, kl as f64 / 10.0 * l_bar);
                let g = match g_matrix(ell, l_bar, s) {
                    Ok(g) => g,
                    Err(_) => {
                        t.push(f64::NAN);
                        continue;
                    }
                };
                let (a, b) = generic_eigenvalues(&g);
                let complex = a.im.abs() > 1e-6;
                if complex != (s < ell && ell < l_bar) {
                    t.push(f64::INFINITY);
                    continue;
                }
                let oracle = a.norm().max(b.norm());
                let closed = g_eigenvalues(ell, l_bar, s).map(|(z, x)| {
                    debug_assert!(z.norm() >= x.norm());
                    z.norm()
                });
                t.push_result(rho(s, ell, l_bar).and_then(|r| {
                    let c = closed?;
                    Ok((r - oracle).abs().max((c - oracle).abs()))
                }));
            }
        }
    }
    t.done()
}

/// Vieta-type and momentum-map identities on a 20×10 grid.
pub fn check_identities() -> Vec<CheckResult> {
    let l_bar = 4.0;
    let names = [
        "ζξ = β(1−λ/L̄)",
        "ζ+ξ = (1+β)(1−λ/L̄)",
        "(1−ζ)(1−ξ) = λ/L̄",
        "(1+β)/(1−β) = √(L̄/s)",
        "4βL̄/(1+β)² = L̄−s",
    ];
    let mut tallies: Vec<Tally> = names.iter().map(|n| Tally::new(n, 1e-10)).collect();
    for js in 1..=20 {
        let s = js as f64 / 20.0 * l_bar;
        for jl in 1..=10 {
            let lam = jl as f64 / 10.0 * l_bar;
            let (z, x) = match g_eigenvalues(lam, l_bar, s) {
                Ok(p) => p,
                Err(_) => {
                    tallies.iter_mut().for_each(|t| t.push(f64::NAN));
                    continue;
                }
            };
            let b = beta(l_bar, s).unwrap_or(f64::NAN);
            let a = 1.0 - lam / l_bar;
            let one = Complex64::new(1.0, 0.0);
            tallies[0].push((z * x - b * a).norm());
            tallies[1].push((z + x - (1.0 + b) * a).norm());
            tallies[2].push(((one - z) * (one - x) - lam / l_bar).norm());
            tallies[3].push(((1.0 + b) / (1.0 - b) - (l_bar / s).sqrt()).abs());
            tallies[4].push((4.0 * b * l_bar / (1.0 + b).powi(2) - (l_bar - s)).abs());
        }
    }
    tallies.into_iter().map(Tally::done).collect()
}

/// `ρ(s, b) < ρ(s, a)` whenever `0 ≤ a < b ≤ L̄`.
pub fn check_rho_monotone() -> CheckResult {
    let mut t = Tally::new("ρ(s,·) decreasing", 1e-12);
    let l_bar = 1.0;
    let ells: Vec<f64> = lin(0.0, l_bar, 40).collect();
    for ks in 1..=10 {
        let s = ks as f64 / 10.0 * l_bar;
        let rhos: Vec<Result<f64>> = ells.iter().map(|&e| rho(s, e, l_bar)).collect();
        for i in 0..ells.len() {
            for j in i + 1..ells.len() {
                match (&rhos[i], &rhos[j]) {
                    (Ok(ra), Ok(rb)) => t.push(rb - ra),
                    _ => t.push(f64::NAN),
                }
            }
        }
    }
    t.done()
}

/// `ρ(s, m) ≤ r_δ(κ)` whenever `m ≤ s ≤ (1+δ)m ≤ L̄`.
pub fn check_rho_below_r_delta() -> CheckResult {
    let mut t = Tally::new("ρ(s,m) ≤ r_δ(κ) for s ∈ [m, (1+δ)m]", 1e-12);
    let l_bar = 1.0;
    for delta in [0.01, 0.1, 0.5, 1.0, 2.0] {
        for kappa in [1.0 + delta, 2.0, 10.0, 1e3, 1e6] {
            if kappa < 1.0 + delta {
                continue;
            }
            let m = l_bar / kappa;
            let cap = r_delta(delta, kappa).unwrap_or(f64::NAN);
            for s in lin(m, ((1.0 + delta) * m).min(l_bar), 20) {
                t.push_result(rho(s, m, l_bar).map(|r| r - cap));
            }
        }
    }
    t.done()
}

/// `ρ(s, ℓ) ≤ r_GD(κ)` for `s, ℓ ∈ [m, L̄]`.
pub fn check_rho_ceiling() -> CheckResult {
    let mut t = Tally::new("ρ(s,ℓ) ≤ r_GD(κ)", 1e-12);
    let l_bar = 1.0;
    for kappa in [2.0, 10.0, 100.0, 1e4] {
        let m = l_bar / kappa;
        let cap = r_gd(kappa).unwrap_or(f64::NAN);
        for s in lin(m, l_bar, 10) {
            for ell in lin(m, l_bar, 20) {
                t.push_result(rho(s, ell, l_bar).map(|r| r - cap));
            }
        }
    }
    t.done()
}

/// Discriminant and factored forms of `r_δ` agree.
pub fn check_r_delta_forms() -> CheckResult {
    let mut t = Tally::new("r_δ discriminant = factored", 1e-12);
    for delta in [0.01, 0.1, 0.5, 1.0, 2.0] {
        for kappa in [1.0 + delta, 2.0, 10.0, 1e3, 1e6] {
            if kappa < 1.0 + delta {
                continue;
            }
            t.push_result(r_delta(delta, kappa).and_then(|a| Ok((a - r_delta_factored(delta, kappa)?).abs())));
        }
    }
    t.done()
}

/// `r_δ(κ) ≤ r_acc(σκ)` for `δ ≤ δ_σ`.
pub fn check_threshold_law() -> CheckResult {
    let mut t = Tally::new("r_δ(κ) ≤ r_acc(σκ) for δ ≤ δ_σ", 1e-12);
    for sigma in [1.5, 2.0, 4.0] {
        let ds = delta_sigma_of(sigma).unwrap_or(f64::NAN);
        for kappa in [2.0, 10.0, 1e3, 1e6] {
            for j in 1..=10 {
                let delta = ds * j as f64 / 10.0;
                if kappa < 1.0 + delta {
                    continue;
                }
                t.push_result(r_delta(delta, kappa).and_then(|r| Ok(r - r_acc(sigma * kappa)?)));
            }
        }
    }
    t.done()
}

/// `ℓ ↦ φ((1+δ)ℓ, ℓ, m)` is nonincreasing on `[m, L̄/(1+δ)]`.
pub fn check_phi_decreasing() -> CheckResult {
    let mut t = Tally::new("φ((1+δ)ℓ,ℓ,m) decreasing", 1e-12);
    let m = 1.0;
    for delta in [0.1, 0.5, 1.0] {
        for kappa in [2.0, 10.0, 100.0, 1e4] {
            let l_bar = kappa * m;
            let top = l_bar / (1.0 + delta);
            if top <= m {
                continue;
            }
            let vals: Vec<Result<f64>> = lin(m, top, 200)
                .skip(1)
                .map(|ell| phi(((1.0 + delta) * ell).min(l_bar), ell, m, l_bar))
                .collect();
            for w in vals.windows(2) {
                match (&w[0], &w[1]) {
                    (Ok(a), Ok(b)) => t.push(b - a),
                    _ => t.push(f64::NAN),
                }
            }
        }
    }
    t.done()
}

/// `(x, y, x⁺, y⁺, momentum, m_t)` to the excess of one descent inequality.
type StepCheck<'a> = dyn FnMut(&[f64], &[f64], &[f64], &[f64], f64, Option<f64>) -> Result<f64> + 'a;

/// Per-mode `[ξ_t, ξ_{t−1}]` paths.
type ModalPaths = Vec<Vec<[f64; 2]>>;

/// Lyapunov descent inequalities along `iters` iterations of NAG, GD and the
/// fixed-`L̄` online method on `diag(spectrum)` with `L̄ = λ_max`.
pub fn check_lyapunov_descent(spectrum: &[f64], x0: &[f64], iters: usize) -> Vec<CheckResult> {
    let q = match Quadratic::diagonal(spectrum) {
        Ok(q) => q,
        Err(_) => return vec![Tally::new("Lyapunov setup", 0.0).done()],
    };
    let m = spectrum[0];
    let l_bar = spectrum[spectrum.len() - 1];
    let kb = l_bar / m;
    let theta = crate::solvers::momentum_coefficient(l_bar, m);
    let w = |x: &[f64], y: &[f64]| lyapunov_w(&q, x, y, m, kb);

    let mut nag = Tally::new("(1+δ^NAG)W(s⁺) ≤ W(s) along NAG", 1e-10);
    let mut gd = Tally::new("(1+δ^GD)W(s⁺) − W(s) ≤ −‖g‖²/2L̄ along GD", 1e-10);
    let mut vgd = Tally::new("(1+δ^GD)V^GD_{t+1}(s⁺) ≤ V^GD_{t+1}(s)", 1e-10);

    let walk = |kind: SolverKind, tally: &mut Tally, f: &mut StepCheck<'_>| {
        let spec = SolverSpec::new(kind, iters).l_bar(l_bar).m_lower(m);
        let mut s = match stepper(&spec, &q, x0, 0) {
            Ok(s) => s,
            Err(_) => return tally.push(f64::NAN),
        };
        for _ in 0..iters {
            let (x, y) = (s.x().to_vec(), s.y().to_vec());
            let m_t = s.snapshot().m;
            s.step();
            tally.push_result(f(&x, &y, s.x(), s.y(), s.last_momentum(), m_t));
        }
    };

    walk(SolverKind::Nag, &mut nag, &mut |x, y, x1, y1, _, _| {
        let w0 = w(x, y)?;
        Ok(relative_excess((1.0 + delta_nag(kb)) * w(x1, y1)?, w0))
    });
    walk(SolverKind::Gd, &mut gd, &mut |x, y, x1, y1, _, _| {
        let g = q.gradient(x);
        Ok((1.0 + delta_gd(kb)) * w(x1, y1)? - w(x, y)? + vecops::norm_sq(&g) / (2.0 * l_bar))
    });
    walk(SolverKind::NagFreeFixedL, &mut vgd, &mut |x, y, x1, y1, b, m_t| {
        if m_t.is_some_and(|mt| mt < m) {
            // The inequality is only claimed while m_t ≥ m.
            return Ok(f64::NEG_INFINITY);
        }
        let ab = alpha_bar(b, theta);
        let before = lyapunov_vgd(&q, x, y, m, l_bar, ab)?;
        let after = lyapunov_vgd(&q, x1, y1, m, l_bar, ab)?;
        Ok(relative_excess((1.0 + delta_gd(kb)) * after, before))
    });
    vec![nag.done(), gd.done(), vgd.done()]
}

/// `(lhs − rhs)/rhs` for a nonnegative `rhs`, falling back to the absolute gap at zero.
fn relative_excess(lhs: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        (lhs - rhs) / rhs
    } else {
        lhs - rhs
    }
}

/// Solver coordinates of the fixed-`L̄` method with a frozen schedule versus
/// [`modal_simulate`] on each eigen-coordinate.
pub fn check_modal_equivalence(
    spectrum: &[f64],
    l_bar: f64,
    schedule: &[(usize, f64)],
    x0: &[f64],
    iters: usize,
) -> CheckResult {
    let mut t = Tally::new("solver coordinates = modal simulation", 1e-10);
    let run = || -> Result<(Vec<Vec<f64>>, ModalPaths)> {
        let q = Quadratic::diagonal(spectrum)?;
        let spec = SolverSpec::new(SolverKind::NagFreeFixedL, iters)
            .l_bar(l_bar)
            .m_policy(MPolicy::Schedule(schedule.to_vec()))
            .warm_start(true);
        let mut s = stepper(&spec, &q, x0, 0)?;
        let mut xs = vec![s.x().to_vec()];
        for _ in 0..iters {
            s.step();
            xs.push(s.x().to_vec());
        }
        let modes = spectrum
            .iter()
            .zip(x0)
            .map(|(&lam, &c)| modal_simulate(&ModalSystem::new(lam, l_bar, schedule.to_vec())?, c, iters))
            .collect::<Result<Vec<_>>>()?;
        Ok((xs, modes))
    };
    match run() {
        Ok((xs, modes)) => {
            let scale = 1.0 + vecops::norm_inf(x0);
            for (k, x) in xs.iter().enumerate() {
                let err = x
                    .iter()
                    .zip(&modes)
                    .map(|(xi, mo)| (xi - mo[k][1]).abs())
                    .fold(0.0, f64::max);
                t.push(err / scale);
            }
        }
        Err(_) => t.push(f64::NAN),
    }
    t.done()
}

/// The solver's `c_{t+1}` equals the eigen-weighted average of the coordinate steps.
pub fn check_curvature_identity(spectrum: &[f64], x0: &[f64], iters: usize, seed: u64) -> CheckResult {
    let mut t = Tally::new("c_{t+1} = weighted modal curvature", 1e-10);
    let run = |t: &mut Tally| -> Result<()> {
        let q = Quadratic::diagonal(spectrum)?;
        let l_bar = spectrum[spectrum.len() - 1];
        let mut s = stepper(
            &SolverSpec::new(SolverKind::NagFreeFixedL, iters).l_bar(l_bar),
            &q,
            x0,
            seed,
        )?;
        for _ in 0..iters {
            let before = s.x().to_vec();
            s.step();
            if let Some(c) = s.snapshot().c {
                let diffs = vecops::sub(s.x(), &before);
                t.push_result(curvature_from_modes(spectrum, &diffs).map(|cm| (c - cm).abs() / c));
            }
        }
        Ok(())
    };
    if run(&mut t).is_err() {
        t.push(f64::NAN);
    }
    t.done()
}

/// The complete suite with its default grids.
pub fn verify_all() -> Vec<CheckResult> {
    let mut out = vec![check_branch_law()];
    out.extend(check_identities());
    out.push(check_rho_monotone());
    out.push(check_rho_below_r_delta());
    out.push(check_rho_ceiling());
    out.push(check_r_delta_forms());
    out.push(check_threshold_law());
    out.push(check_phi_decreasing());
    out.extend(check_lyapunov_descent(&[1.0, 4.0, 100.0], &[1.0, 1.0, 1.0], 200));
    let spectrum = [1.0, 3.0, 20.0, 100.0];
    let x0 = [1.0, -2.0, 0.5, 1.5];
    out.push(check_modal_equivalence(
        &spectrum,
        110.0,
        &[(0, 110.0), (40, 20.0), (150, 1.0)],
        &x0,
        500,
    ));
    out.push(check_curvature_identity(&spectrum, &x0, 500, 7));
    out
}
