use super::*;
use crate::objective::FnObjective;
use crate::problems::{random_quadratic, Quadratic};
use crate::rng;
use proptest::prelude::*;

fn half_square() -> FnObjective {
    FnObjective::new(1, |x| 0.5 * x[0] * x[0], |x, g| g[0] = x[0]).with_smoothness_bound(1.0)
}

fn max_diff(a: &Trace, b: &Trace) -> f64 {
    assert_eq!(a.records.len(), b.records.len());
    a.records
        .iter()
        .zip(&b.records)
        .map(|(r, s)| {
            (r.f_x - s.f_x)
                .abs()
                .max((r.f_y - s.f_y).abs())
                .max((r.grad_norm - s.grad_norm).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn gd_solves_scalar_quadratic_in_one_step() {
    let tr = run(
        &SolverSpec::new(SolverKind::Gd, 3).l_bar(1.0),
        &half_square(),
        &[1.0],
        0,
    )
    .unwrap();
    let f: Vec<f64> = tr.records.iter().map(|r| r.f_x).collect();
    assert_eq!(f, vec![0.5, 0.0, 0.0, 0.0]);
    assert_eq!(tr.converged_at, Some(1));
}

#[test]
fn grad_tol_stops_early() {
    let spec = SolverSpec::new(SolverKind::Gd, 50).l_bar(1.0).grad_tol(1e-12);
    let tr = run(&spec, &half_square(), &[1.0], 0).unwrap();
    assert_eq!(tr.records.len(), 2);
}

#[test]
fn fixed_l_on_scalar_quadratic_matches_gd() {
    let q = Quadratic::diagonal(&[1.0]).unwrap();
    let gd = run(&SolverSpec::new(SolverKind::Gd, 20).l_bar(1.0), &q, &[2.0], 4).unwrap();
    let nf = run(
        &SolverSpec::new(SolverKind::NagFreeFixedL, 20).l_bar(1.0),
        &q,
        &[2.0],
        4,
    )
    .unwrap();
    assert_eq!(max_diff(&gd, &nf), 0.0);
}

#[test]
fn nag_first_descent_step() {
    let q = Quadratic::diagonal(&[1.0, 4.0]).unwrap();
    let spec = SolverSpec::new(SolverKind::Nag, 5).l_bar(4.0).m_lower(1.0);
    let mut s = stepper(&spec, &q, &[1.0, 1.0], 0).unwrap();
    s.step();
    // y1 = x0 − (1, 4)/4
    assert_eq!(s.y(), &[0.75, 0.0]);
    assert_eq!(s.last_momentum(), 1.0 / 3.0);
}

#[test]
fn runs_are_deterministic() {
    let q = random_quadratic(10, 1.0, 1e3, true, &mut rng::seeded(2)).unwrap();
    let x0 = vec![1.0; 10];
    for kind in SolverKind::ALL {
        let mut spec = SolverSpec::new(kind, 60);
        if kind == SolverKind::NagFreeRestart {
            spec = spec.restart_period(7);
        }
        let a = run(&spec, &q, &x0, 9).unwrap();
        let b = run(&spec, &q, &x0, 9).unwrap();
        assert_eq!(a.records, b.records, "{kind}");
        assert!(a.is_well_formed(), "{kind}");
        assert_eq!(a.records.len(), 61, "{kind}");
    }
}

#[test]
fn every_method_makes_progress_on_a_quadratic() {
    let q = random_quadratic(10, 1.0, 100.0, true, &mut rng::seeded(5)).unwrap();
    let x0 = vec![1.0; 10];
    for kind in SolverKind::ALL {
        let mut spec = SolverSpec::new(kind, 400);
        if kind == SolverKind::NagFreeRestart {
            spec = spec.restart_period(50);
        }
        let tr = run(&spec, &q, &x0, 1).unwrap();
        let (f0, ft) = (tr.records[0].f_x, tr.final_value().unwrap());
        assert!(!tr.diverged && ft < 1e-6 * f0, "{kind}: {f0} -> {ft}");
    }
}

#[test]
fn endpoints_reproduce_gd_and_nag() {
    let q = Quadratic::diagonal(&[1.0, 4.0, 100.0]).unwrap();
    let x0 = [1.0, 1.0, 1.0];
    let gd = run(&SolverSpec::new(SolverKind::Gd, 200), &q, &x0, 0).unwrap();
    let pinned_l = SolverSpec::new(SolverKind::NagFreeFixedL, 200).m_policy(MPolicy::Pinned(100.0));
    assert!(max_diff(&gd, &run(&pinned_l, &q, &x0, 0).unwrap()) <= 1e-12);

    let nag = run(&SolverSpec::new(SolverKind::Nag, 200), &q, &x0, 0).unwrap();
    let pinned_m = SolverSpec::new(SolverKind::NagFreeFixedL, 200).m_policy(MPolicy::Pinned(1.0));
    assert!(max_diff(&nag, &run(&pinned_m, &q, &x0, 0).unwrap()) <= 1e-12);
}

#[test]
fn divergent_step_is_flagged() {
    let tr = run(
        &SolverSpec::new(SolverKind::Gd, 1000).step(2.5),
        &half_square(),
        &[1.0],
        0,
    )
    .unwrap();
    assert!(tr.diverged);
    assert!(tr.records.len() < 1001);
    assert!(tr.is_well_formed());
}

#[test]
fn periodic_restart_every_iteration() {
    let q = Quadratic::diagonal(&[1.0, 10.0]).unwrap();
    let spec = SolverSpec::new(SolverKind::NagFreeRestart, 10).restart_period(1);
    let tr = run(&spec, &q, &[1.0, 1.0], 3).unwrap();
    assert!(tr.records[1..].iter().all(|r| r.restarted));
    // Once the iterates reach machine zero the sample is degenerate and the estimates persist.
    for r in tr.records[1..].iter().filter(|r| r.c_t.is_some()) {
        assert_eq!(r.m_t, r.c_t);
        assert_eq!(r.l_t, r.c_t);
        assert_eq!(r.f_x, r.f_y);
    }
}

#[test]
fn invalid_specs_are_rejected() {
    let no_bounds = FnObjective::new(1, |x| x[0] * x[0], |x, g| g[0] = 2.0 * x[0]);
    let err = |spec: SolverSpec| run(&spec, &no_bounds, &[1.0], 0).unwrap_err();
    assert!(matches!(err(SolverSpec::new(SolverKind::Gd, 5)), Error::InvalidSpec(_)));
    assert!(matches!(
        err(SolverSpec::new(SolverKind::Nag, 5).l_bar(2.0)),
        Error::InvalidSpec(_)
    ));
    assert!(matches!(
        err(SolverSpec::new(SolverKind::NagFreeRestart, 5)),
        Error::InvalidSpec(_)
    ));
    assert!(matches!(
        err(SolverSpec::new(SolverKind::NagFree, 0)),
        Error::InvalidSpec(_)
    ));
    assert!(matches!(
        run(&SolverSpec::new(SolverKind::NagFree, 5), &no_bounds, &[1.0, 2.0], 0).unwrap_err(),
        Error::Shape(_)
    ));
    assert_eq!(
        "nagfree_fixedL".parse::<SolverKind>().unwrap(),
        SolverKind::NagFreeFixedL
    );
    assert!("sgd".parse::<SolverKind>().is_err());
}

#[test]
fn grid_search_examples() {
    let f = half_square();
    assert_eq!(grid_search_step(&f, &[1.0], &[0.5, 1.0, 1.9, 2.1], 50).unwrap(), 1.0);
    assert_eq!(
        grid_search_step(&f, &[1.0], &[2.1], 50).unwrap_err(),
        Error::NoStableStep
    );
    assert_eq!(grid_search_step(&f, &[1.0], &[1.0, 1.0], 50).unwrap(), 1.0);
    let weak = grid_search_step_with(&f, &[1.0], &[0.1, 0.5, 1.0], 50, GridMethod::NagWeak).unwrap();
    assert!([0.1, 0.5, 1.0].contains(&weak));
}

#[test]
fn grid_extends_below_default_when_all_diverge() {
    // Curvature 1 but a probe of 1000 puts every default candidate at or
    // below 16/1000, so all converge; a probe of 1e-3 puts them all above 2.
    let f = half_square();
    let step = grid_search_around(&f, &[1.0], 1e-3, 50, GridMethod::Gd).unwrap();
    assert!(step < 2.0 && step > 0.0);
    assert!(default_step_grid(1e-3).iter().all(|&s| s > 2.0));
    assert!(default_step_grid(1e3).contains(&grid_search_around(&f, &[1.0], 1e3, 50, GridMethod::Gd).unwrap()));
}

#[test]
fn schedule_lookup() {
    let p = MPolicy::Schedule(vec![(0, 8.0), (5, 2.0), (9, 1.0)]);
    assert_eq!(p.at(0), Some(8.0));
    assert_eq!(p.at(4), Some(8.0));
    assert_eq!(p.at(5), Some(2.0));
    assert_eq!(p.at(100), Some(1.0));
    assert!(MPolicy::Schedule(vec![(1, 1.0)]).validate().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gd_is_monotone(seed in any::<u64>(), d in 2usize..12) {
        let mut r = rng::seeded(seed);
        let q = random_quadratic(d, 1.0, 1e3, true, &mut r).unwrap();
        let x0 = rng::uniform_vec(&mut r, d, -5.0, 5.0);
        let tr = run(&SolverSpec::new(SolverKind::Gd, 200), &q, &x0, 0).unwrap();
        for w in tr.records.windows(2) {
            prop_assert!(w[1].f_x <= w[0].f_x);
        }
    }

    #[test]
    fn fixed_l_step_is_convex_combination_of_descent_and_nag(seed in any::<u64>(), d in 2usize..10) {
        let mut r = rng::seeded(seed);
        let q = random_quadratic(d, 1.0, 1e3, true, &mut r).unwrap();
        let (m, l_bar) = (q.eigenvalues()[0], q.eigenvalues()[d - 1]);
        let theta = momentum_coefficient(l_bar, m);
        let x0 = rng::uniform_vec(&mut r, d, -1.0, 1.0);
        let spec = SolverSpec::new(SolverKind::NagFreeFixedL, 100);
        let mut s = stepper(&spec, &q, &x0, seed).unwrap();
        for _ in 0..100 {
            let y_prev = s.y().to_vec();
            let m_t = s.snapshot().m.unwrap();
            s.step();
            let beta = s.last_momentum();
            prop_assert!(m_t >= m * (1.0 - 1e-9));
            let alpha = beta / theta;
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&alpha));
            let y = s.y();
            let x_nag = vecops::extrapolate(y, &y_prev, theta);
            for i in 0..d {
                let combo = (1.0 - alpha) * y[i] + alpha * x_nag[i];
                prop_assert!((combo - s.x()[i]).abs() <= 1e-12 * (1.0 + s.x()[i].abs()));
            }
        }
    }

    #[test]
    fn backtracking_overshoots_l_by_at_most_the_factor(seed in any::<u64>(), d in 2usize..10) {
        let mut r = rng::seeded(seed);
        let q = random_quadratic(d, 1.0, 1e3, true, &mut r).unwrap();
        let l = q.eigenvalues()[d - 1];
        let x0 = rng::uniform_vec(&mut r, d, -1.0, 1.0);
        for kind in [SolverKind::NagFreeBacktrack, SolverKind::NagRestartBacktrack] {
            let tr = run(&SolverSpec::new(kind, 300), &q, &x0, seed).unwrap();
            for rec in &tr.records {
                prop_assert!(rec.l_t.unwrap() <= BACKTRACK_FACTOR * l * (1.0 + 1e-12));
            }
        }
    }
}
