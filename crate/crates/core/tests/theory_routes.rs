//! Closed forms checked against a second, independent computation.

use nagfree_core::theory;
use num_complex::Complex64;

/// Spectral radius of a 2×2 matrix from its trace and determinant.
fn radius(g: [[f64; 2]; 2]) -> f64 {
    let tr = g[0][0] + g[1][1];
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let root = Complex64::new(tr * tr / 4.0 - det, 0.0).sqrt();
    let half = Complex64::new(tr / 2.0, 0.0);
    (half + root).norm().max((half - root).norm())
}

#[test]
fn rho_matches_the_matrix_spectrum() {
    let l_bar = 1.0;
    for &s in &[1e-4, 1e-2, 0.1, 0.5, 1.0] {
        for &ell in &[1e-4, 3e-3, 0.05, 0.3, 0.9, 1.0] {
            let closed = theory::rho(s, ell, l_bar).unwrap();
            let direct = radius(theory::g_matrix(ell, l_bar, s).unwrap());
            // Coincident roots lose half the digits in the square root.
            assert!((closed - direct).abs() <= 1e-7, "s={s} ℓ={ell}: {closed} vs {direct}");
        }
    }
}

#[test]
fn r_delta_forms_agree_with_rho() {
    for &delta in &[0.01, 0.1, 1.0] {
        for &kappa in &[3.0, 50.0, 1e4] {
            let m = 1.0 / kappa;
            let a = theory::r_delta(delta, kappa).unwrap();
            let b = theory::r_delta_factored(delta, kappa).unwrap();
            let c = theory::rho((1.0 + delta) * m, m, 1.0).unwrap();
            assert!((a - b).abs() <= 1e-12 && (a - c).abs() <= 1e-12, "{a} {b} {c}");
        }
    }
}

#[test]
fn sigma_m_inverts_and_bounds_r_delta() {
    for &delta in &[0.01, 0.2, 1.5] {
        let sigma = theory::sigma_m(delta).unwrap();
        assert!((theory::delta_sigma_of(sigma).unwrap() - delta).abs() <= 1e-12);
        for &kappa in &[10.0, 1e3, 1e6] {
            let lhs = theory::r_delta(delta, kappa).unwrap();
            let rhs = theory::r_acc(sigma * kappa).unwrap();
            assert!(lhs <= rhs + 1e-12, "δ={delta} κ={kappa}");
        }
    }
}

#[test]
fn sigma_phi_tends_to_its_limit() {
    // Frozen: 1/(4(√(δu+δℓ+δuδℓ) − √(δu(1+δℓ)))²) at δu = 0.01, δℓ = 0.18.
    let limit = theory::sigma_phi_limit(0.01, 0.18).unwrap();
    assert!((limit - 2.305_147).abs() < 1e-6, "{limit}");
    let mut prev = f64::INFINITY;
    for &kappa in &[1e4, 1e6, 1e8, 1e10] {
        let gap = (theory::sigma_phi(0.01, 0.18, kappa).unwrap() - limit).abs();
        assert!(gap < prev);
        prev = gap;
    }
    assert!(prev / limit < 1e-3);
}

#[test]
fn every_grid_check_passes() {
    let checks = theory::verify_all();
    assert!(checks.len() >= 10);
    for c in checks {
        assert!(
            c.passed(),
            "{} failed {} of {} (worst {:.2e})",
            c.name,
            c.failures,
            c.cases,
            c.worst
        );
    }
}
