//! Numbered acceptance checks. Each returns an [`Outcome`] instead of
//! panicking so callers can report every result.
//!
//! All runs here are sequential so that the timing limits refer to a single
//! thread.

use crate::experiment::{run_experiment_with, ExperimentConfig};
use crate::problem::{load_libsvm, ProblemConfig, DEFAULT_DATASET, DEFAULT_LOGISTIC_ETA};
use nagfree_core::exec::Execution;
use nagfree_core::linalg::random_orthonormal;
use nagfree_core::objective::Objective;
use nagfree_core::problems::{
    logistic_objective, quadratic_from_spectrum, random_log_sum_exp, random_quadratic, Quadratic, QuadraticSpec,
};
use nagfree_core::solvers::{run, stepper, MPolicy, SolverKind, SolverSpec};
use nagfree_core::{estimators, rng, theory, vecops, Result as CoreResult};
use std::fmt;
use std::time::{Duration, Instant};

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {} ({:.2}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

/// Times `body`, which returns `(passed, detail)`. A `limit` turns an
/// overrun into a failure. Errors count as failures.
fn timed(
    id: u8,
    name: &'static str,
    limit: Option<Duration>,
    body: impl FnOnce() -> CoreResult<(bool, String)>,
) -> Outcome {
    let start = Instant::now();
    let (mut passed, mut detail) = body().unwrap_or_else(|e| (false, format!("error: {e}")));
    let elapsed = start.elapsed();
    if let Some(limit) = limit {
        if elapsed > limit {
            passed = false;
            detail = format!(
                "{detail}; runtime {:.2}s exceeds {:.0}s",
                elapsed.as_secs_f64(),
                limit.as_secs_f64()
            );
        }
    }
    Outcome {
        id,
        name,
        passed,
        detail,
        elapsed,
    }
}

/// Rotated quadratic with minimizer at the origin, so iterates keep full
/// relative precision as they converge.
fn rotated_quadratic(d: usize, lo: f64, hi: f64, seed: u64) -> CoreResult<Quadratic> {
    let mut g = rng::seeded(seed);
    let mut eigs = rng::log_uniform_vec(&mut g, d, lo, hi);
    eigs.sort_by(f64::total_cmp);
    let basis = random_orthonormal(d, &mut g);
    quadratic_from_spectrum(QuadraticSpec::diagonal(eigs).with_basis(basis))
}

fn extremes(obj: &dyn Objective) -> (f64, f64) {
    let s = obj.spectrum().expect("quadratic");
    (s[0], s[s.len() - 1])
}

/// Curvature sandwich on 100 seeded quadratics, 100 point pairs each.
pub fn curvature_sandwich() -> Outcome {
    timed(1, "curvature sandwich", Some(Duration::from_secs(5)), || {
        let (mut pairs, mut worst) = (0usize, f64::NEG_INFINITY);
        let mut bad = 0;
        for i in 0..100u64 {
            let mut g = rng::stream(i, 0xc1);
            let d = 2 + (i as usize % 19);
            let q = random_quadratic(d, 1.0, 1e4, true, &mut g)?;
            let (m, l) = extremes(&q);
            for _ in 0..100 {
                let x = rng::gaussian_vec(&mut g, d);
                let y = rng::gaussian_vec(&mut g, d);
                let Some(c) = estimators::curvature(&x, &q.gradient(&x), &y, &q.gradient(&y)) else {
                    continue;
                };
                pairs += 1;
                let excess = (m * (1.0 - 1e-9) - c).max(c - l * (1.0 + 1e-9));
                worst = worst.max(excess);
                if excess > 0.0 {
                    bad += 1;
                }
            }
        }
        Ok((
            bad == 0 && pairs > 0,
            format!("{pairs} pairs, {bad} outside [m(1-1e-9), L(1+1e-9)]"),
        ))
    })
}

/// Monotone estimates along 20 seeded runs of the online method.
pub fn estimator_monotonicity() -> Outcome {
    timed(2, "estimator monotonicity", None, || {
        let mut violations = Vec::new();
        for seed in 1..=20u64 {
            let q = rotated_quadratic(10, 1.0, 1e3, seed)?;
            let (m, l) = extremes(&q);
            let x0 = rng::gaussian_vec(&mut rng::stream(seed, 0xc2), 10);
            let tr = run(&SolverSpec::new(SolverKind::NagFree, 500), &q, &x0, seed)?;
            let est: Vec<(f64, f64)> = tr
                .records
                .iter()
                .map(|r| (r.m_t.unwrap_or(f64::NAN), r.l_t.unwrap_or(f64::NAN)))
                .collect();
            let ordered = est.windows(2).all(|w| w[1].0 <= w[0].0 && w[1].1 >= w[0].1);
            let bounded = est
                .iter()
                .all(|&(mt, lt)| mt <= lt && mt >= m * (1.0 - 1e-9) && lt <= l * (1.0 + 1e-9));
            if !(ordered && bounded) {
                violations.push(seed);
            }
        }
        Ok((
            violations.is_empty(),
            format!("20 runs, violations in seeds {violations:?}"),
        ))
    })
}

/// `f(y_t) − f* ≤ 2L̄κ̄((κ̄−1)/κ̄)^{t−1}‖x0−x*‖²` for `t ≤ iters`; returns the
/// largest ratio of the two sides.
#[allow(clippy::too_many_arguments)]
fn global_rate_ratio(
    obj: &dyn Objective,
    x0: &[f64],
    x_star: &[f64],
    f_star: f64,
    l_bar: f64,
    m: f64,
    seed: u64,
    iters: usize,
) -> CoreResult<f64> {
    let kb = l_bar / m;
    let tr = run(
        &SolverSpec::new(SolverKind::NagFreeFixedL, iters).l_bar(l_bar),
        obj,
        x0,
        seed,
    )?;
    let r0 = vecops::dist(x0, x_star).powi(2);
    let mut worst: f64 = 0.0;
    for rec in tr.records.iter().skip(1) {
        let bound = 2.0 * l_bar * kb * ((kb - 1.0) / kb).powi(rec.t as i32 - 1) * r0;
        worst = worst.max((rec.f_y - f_star) / bound);
    }
    Ok(worst)
}

pub fn global_rate() -> Outcome {
    timed(3, "global rate", None, || {
        let mut worst: f64 = 0.0;
        for seed in 1..=20u64 {
            let q = rotated_quadratic(10, 1.0, 1e3, seed)?;
            let (m, l) = extremes(&q);
            let x0 = rng::gaussian_vec(&mut rng::stream(seed, 0xc3), 10);
            worst = worst.max(global_rate_ratio(&q, &x0, &[0.0; 10], 0.0, 1.1 * l, m, seed, 2000)?);
        }
        let quad_worst = worst;

        let data = load_libsvm(DEFAULT_DATASET).map_err(|e| nagfree_core::Error::Domain(e.to_string()))?;
        let f = logistic_objective(data, DEFAULT_LOGISTIC_ETA)?;
        let l = f.smoothness_bound().expect("logistic has a bound");
        let m = f.strong_convexity_bound().expect("regularized");
        let x0 = vec![0.0; f.dim()];
        // Reference optimum from a long run of the same method.
        let mut s = stepper(&SolverSpec::new(SolverKind::NagFreeFixedL, 1).l_bar(l), &f, &x0, 0)?;
        let mut best = f64::INFINITY;
        for _ in 0..40_000 {
            s.step();
            best = best.min(s.snapshot().f_y).min(s.snapshot().f_x);
        }
        let x_star = s.x().to_vec();
        let tr = run(
            &SolverSpec::new(SolverKind::NagFreeFixedL, 2000).l_bar(1.1 * l),
            &f,
            &x0,
            1,
        )?;
        let f_star = tr.records.iter().map(|r| r.f_y).fold(best, f64::min);
        let logistic = global_rate_ratio(&f, &x0, &x_star, f_star, 1.1 * l, m, 1, 2000)?;
        worst = worst.max(logistic);
        Ok((
            worst <= 1.0 + 1e-8,
            format!("max lhs/rhs {quad_worst:.3e} on 20 quadratics, {logistic:.3e} on logistic"),
        ))
    })
}

/// Fixed-`L̄` method with `m_t` pinned at `L̄` (resp. `m`) against GD (resp. NAG).
pub fn interpolation_endpoints() -> Outcome {
    timed(4, "interpolation endpoints", None, || {
        let q = Quadratic::diagonal(&[1.0, 4.0, 100.0])?;
        let x0 = [1.0, 1.0, 1.0];
        let gap = |a: SolverSpec, b: SolverSpec| -> CoreResult<f64> {
            let mut sa = stepper(&a, &q, &x0, 1)?;
            let mut sb = stepper(&b, &q, &x0, 1)?;
            let mut worst: f64 = 0.0;
            for _ in 0..=200 {
                let dx = vecops::norm_inf(&vecops::sub(sa.x(), sb.x()));
                let dy = vecops::norm_inf(&vecops::sub(sa.y(), sb.y()));
                worst = worst.max(dx).max(dy);
                sa.step();
                sb.step();
            }
            Ok(worst)
        };
        let fixed = |v: f64| {
            SolverSpec::new(SolverKind::NagFreeFixedL, 200)
                .l_bar(100.0)
                .m_policy(MPolicy::Pinned(v))
        };
        let gd = gap(fixed(100.0), SolverSpec::new(SolverKind::Gd, 200).l_bar(100.0))?;
        let nag = gap(
            fixed(1.0),
            SolverSpec::new(SolverKind::Nag, 200).l_bar(100.0).m_lower(1.0),
        )?;
        Ok((
            gd <= 1e-12 && nag <= 1e-12,
            format!("max |Δ| vs gd {gd:.1e}, vs nag {nag:.1e}"),
        ))
    })
}

const MODAL_SPECTRA: [&[f64]; 5] = [
    &[1.0, 3.0, 20.0, 100.0],
    &[1.0, 2.0],
    &[0.5, 5.0, 50.0],
    &[1.0, 10.0, 100.0, 1000.0],
    &[2.0, 2.5, 3.0, 40.0, 200.0],
];

fn modal_schedules(spectrum: &[f64], l_bar: f64) -> [Vec<(usize, f64)>; 3] {
    let (lo, hi) = (spectrum[0], spectrum[spectrum.len() - 1]);
    let mid = spectrum[spectrum.len() / 2];
    [
        vec![(0, hi)],
        vec![(0, l_bar), (40, mid), (150, lo)],
        vec![(0, hi / 2.0), (10, lo), (300, lo / 2.0)],
    ]
}

fn modal_x0(n: usize) -> Vec<f64> {
    (0..n).map(|i| [1.0, -2.0, 0.5, 1.5, -0.75][i % 5]).collect()
}

pub fn modal_equivalence() -> Outcome {
    timed(5, "modal oracle equivalence", Some(Duration::from_secs(2)), || {
        let (mut worst, mut failed) = (0.0f64, 0);
        for spectrum in MODAL_SPECTRA {
            let l_bar = 1.1 * spectrum[spectrum.len() - 1];
            for schedule in modal_schedules(spectrum, l_bar) {
                let r = theory::check_modal_equivalence(spectrum, l_bar, &schedule, &modal_x0(spectrum.len()), 500);
                worst = worst.max(r.worst);
                failed += usize::from(!r.passed());
            }
        }
        Ok((
            failed == 0,
            format!("15 cases, worst scaled error {worst:.1e}, {failed} failed"),
        ))
    })
}

pub fn curvature_identity() -> Outcome {
    timed(6, "curvature weighted-average identity", None, || {
        let (mut worst, mut failed) = (0.0f64, 0);
        for (i, spectrum) in MODAL_SPECTRA.iter().enumerate() {
            let r = theory::check_curvature_identity(spectrum, &modal_x0(spectrum.len()), 500, i as u64 + 1);
            worst = worst.max(r.worst);
            failed += usize::from(!r.passed());
        }
        Ok((failed == 0, format!("5 spectra, worst relative error {worst:.1e}")))
    })
}

pub fn theory_grid_suite() -> Outcome {
    timed(7, "theory grid suite", Some(Duration::from_secs(10)), || {
        let mut checks = vec![theory::check_branch_law()];
        checks.extend(theory::check_identities());
        checks.extend([
            theory::check_rho_monotone(),
            theory::check_rho_below_r_delta(),
            theory::check_rho_ceiling(),
            theory::check_r_delta_forms(),
            theory::check_threshold_law(),
            theory::check_phi_decreasing(),
        ]);
        let failed: Vec<&str> = checks.iter().filter(|c| !c.passed()).map(|c| c.name.as_str()).collect();
        let cases: usize = checks.iter().map(|c| c.cases).sum();
        Ok((
            failed.is_empty(),
            format!("{} checks, {cases} cases, failing: {failed:?}", checks.len()),
        ))
    })
}

pub fn sigma_phi_asymptote() -> Outcome {
    timed(8, "σ_φ asymptote", None, || {
        let limit = theory::sigma_phi_limit(0.01, 0.18)?;
        let at = theory::sigma_phi(0.01, 0.18, 1e9)?;
        let rel = (at - limit).abs() / limit;
        Ok((
            (2.25..=2.37).contains(&limit) && rel <= 0.03,
            format!("limit {limit:.4}, σ_φ(κ=1e9) {at:.4} ({:.2}% off)", 100.0 * rel),
        ))
    })
}

pub fn lyapunov_descent() -> Outcome {
    timed(9, "Lyapunov descent", None, || {
        let checks = theory::check_lyapunov_descent(&[1.0, 4.0, 100.0], &[1.0, 1.0, 1.0], 200);
        let detail = checks
            .iter()
            .map(|c| format!("{} worst {:.1e}", c.name, c.worst))
            .collect::<Vec<_>>()
            .join("; ");
        Ok((checks.len() == 3 && checks.iter().all(|c| c.passed()), detail))
    })
}

/// `diag(1, 5·I_98, 10⁴)`.
fn wide_quadratic() -> CoreResult<Quadratic> {
    let mut eigs = vec![5.0; 100];
    eigs[0] = 1.0;
    eigs[99] = 1e4;
    Quadratic::diagonal(&eigs)
}

pub fn local_acceleration() -> Outcome {
    timed(10, "local acceleration", Some(Duration::from_secs(10)), || {
        let q = wide_quadratic()?;
        let x0 = vec![1.0; 100];
        let r_sub = theory::r_acc(1.2e4)?;
        let (mut worst, mut m_final) = (0.0f64, 0.0f64);
        // Separation of the estimate from the spectrum, reported but not enforced.
        let mut sep = f64::INFINITY;
        for seed in 1..=5 {
            let tr = run(
                &SolverSpec::new(SolverKind::NagFreeFixedL, 3000).l_bar(1e4),
                &q,
                &x0,
                seed,
            )?;
            let f0 = tr.records[0].f_x;
            for rec in &tr.records[50..] {
                worst = worst.max(rec.f_x / f0 / (10.0 * r_sub.powi(2 * rec.t as i32)));
            }
            m_final = m_final.max(tr.last().and_then(|r| r.m_t).unwrap_or(f64::INFINITY));
            for m in tr.records.iter().filter_map(|r| r.m_t) {
                sep = [1.0, 5.0, 1e4].iter().map(|l| (m - l).abs()).fold(sep, f64::min);
            }
        }
        Ok((
            worst <= 1.0 && m_final <= 1.2,
            format!("5 seeds: max f_t/(10 f_0 r_sub^2t) {worst:.3}, max m_T {m_final:.4}, δ_λ {sep:.1e}"),
        ))
    })
}

pub fn two_stage() -> Outcome {
    timed(11, "two-stage estimate", None, || {
        let q = Quadratic::diagonal(&[1.0, 5.0, 1e4])?;
        let mut notes = Vec::new();
        let mut ok = true;
        for seed in 1..=5 {
            let tr = run(
                &SolverSpec::new(SolverKind::NagFreeFixedL, 3000).l_bar(1e4),
                &q,
                &[1.0, 1e5, 1.0],
                seed,
            )?;
            let m: Vec<f64> = tr.records.iter().map(|r| r.m_t.unwrap_or(f64::NAN)).collect();
            let plateau = m.iter().position(|v| (4.5..=5.5).contains(v));
            let low = m.iter().position(|v| *v <= 1.2);
            let good = matches!((plateau, low), (Some(p), Some(l)) if p < l);
            ok &= good;
            notes.push(format!("{plateau:?}<{low:?}"));
        }
        Ok((
            ok,
            format!("first t in [4.5,5.5] < first t ≤ 1.2 per seed: {}", notes.join(", ")),
        ))
    })
}

pub fn logsumexp_limit() -> Outcome {
    timed(12, "log-sum-exp estimate limit", None, || {
        let eta = 0.1;
        let f = random_log_sum_exp(60, 60, 0.1, eta, 0)?;
        let x0 = vec![0.0; 60];
        let mut finals = Vec::new();
        for seed in 1..=5 {
            let tr = run(&SolverSpec::new(SolverKind::NagFree, 5000), &f, &x0, seed)?;
            finals.push(tr.last().and_then(|r| r.m_t).unwrap_or(f64::NAN));
        }
        let ok = finals.iter().all(|m| (eta..=5.0 * eta).contains(m));
        let shown: Vec<String> = finals.iter().map(|m| format!("{m:.7}")).collect();
        Ok((
            ok,
            format!(
                "m_T over 5 seeds [{}], required in [{eta}, {}]",
                shown.join(", "),
                5.0 * eta
            ),
        ))
    })
}

/// Iterations until `f(x_t) ≤ tol` (with `f* = 0`), or `None` within `cap`.
fn hitting_time(spec: &SolverSpec, q: &Quadratic, x0: &[f64], tol: f64, cap: usize) -> CoreResult<Option<usize>> {
    let mut s = stepper(spec, q, x0, 0)?;
    for t in 0..=cap {
        if s.snapshot().f_x <= tol {
            return Ok(Some(t));
        }
        s.step();
    }
    Ok(None)
}

/// Log-spaced spectrum of 100 values in `[1, 10⁴]`.
pub fn baseline_quadratic() -> CoreResult<Quadratic> {
    let eigs: Vec<f64> = (0..100).map(|i| 10f64.powf(4.0 * i as f64 / 99.0)).collect();
    Quadratic::diagonal(&eigs)
}

pub fn baseline_sanity() -> Outcome {
    timed(13, "baseline sanity", None, || {
        let q = baseline_quadratic()?;
        let x0 = vec![1.0; 100];
        let (l, m) = (1e4, 1.0);
        let nag_spec = SolverSpec::new(SolverKind::Nag, 1).l_bar(l).m_lower(m);
        let nag = hitting_time(&nag_spec, &q, &x0, 1e-8, 50_000)?;
        let gd = hitting_time(&SolverSpec::new(SolverKind::Gd, 1).l_bar(l), &q, &x0, 1e-8, 500_000)?;
        // Both methods underflow to exactly 0 well before 50 000 iterations,
        // which would make the comparison vacuous.
        let budget = 2000;
        let final_of = |kind| -> CoreResult<f64> {
            let tr = run(&SolverSpec::new(kind, budget).l_bar(l).m_lower(m), &q, &x0, 0)?;
            Ok(tr.final_value().unwrap_or(f64::NAN))
        };
        let (f_nag, f_tmm) = (final_of(SolverKind::Nag)?, final_of(SolverKind::Tmm)?);
        let nag_ok = nag.is_some();
        let gd_ok = gd.is_none();
        let tmm_ok = f_tmm <= f_nag;
        Ok((
            nag_ok && gd_ok && tmm_ok,
            format!(
                "nag reaches 1e-8 at {nag:?} (need ≤ 50000), gd at {gd:?} (need > 500000), \
                 after {budget}: tmm {f_tmm:.2e} vs nag {f_nag:.2e}"
            ),
        ))
    })
}

pub fn restart_vs_gd() -> Outcome {
    timed(14, "restart variant vs grid-searched gd", None, || {
        let cfg = ExperimentConfig::new(
            ProblemConfig::Cubic { dataset: None },
            vec![
                SolverSpec::new(SolverKind::NagFreeRestart, 2000).restart_period(1),
                SolverSpec::new(SolverKind::Gd, 2000),
            ],
            2000,
        );
        let r =
            run_experiment_with(&cfg, Execution::Sequential).map_err(|e| nagfree_core::Error::Domain(e.to_string()))?;
        let last = |id: &str| {
            r.series_for(id)
                .and_then(|s| s.mean.last().copied())
                .unwrap_or(f64::NAN)
        };
        let (restart, gd) = (last("nagfree_restart"), last("gd"));
        Ok((
            restart <= gd,
            format!(
                "final mean suboptimality: nagfree_restart {restart:.3e}, gd {gd:.3e} (step {:.3e})",
                r.grid_steps["gd"]
            ),
        ))
    })
}

/// Criteria 1–14 in order.
pub fn run_primary() -> Vec<Outcome> {
    vec![
        curvature_sandwich(),
        estimator_monotonicity(),
        global_rate(),
        interpolation_endpoints(),
        modal_equivalence(),
        curvature_identity(),
        theory_grid_suite(),
        sigma_phi_asymptote(),
        lyapunov_descent(),
        local_acceleration(),
        two_stage(),
        logsumexp_limit(),
        baseline_sanity(),
        restart_vs_gd(),
    ]
}

/// Criteria 1–14 followed by the total-runtime criterion.
pub fn run_all() -> Vec<Outcome> {
    let start = Instant::now();
    let mut out = run_primary();
    let total = start.elapsed();
    out.push(Outcome {
        id: 15,
        name: "full suite runtime",
        passed: total <= Duration::from_secs(300),
        detail: format!(
            "criteria 1-14 took {:.1}s single-threaded (limit 300s)",
            total.as_secs_f64()
        ),
        elapsed: total,
    });
    out
}

/// The desk-scale rate runs (criteria 10–14).
pub fn run_rates() -> Vec<Outcome> {
    vec![
        local_acceleration(),
        two_stage(),
        logsumexp_limit(),
        baseline_sanity(),
        restart_vs_gd(),
    ]
}
