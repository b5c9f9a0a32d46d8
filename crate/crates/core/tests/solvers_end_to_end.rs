use nagfree_core::exec::Execution;
use nagfree_core::problems::{random_quadratic, Quadratic};
use nagfree_core::solvers::{run, SolverKind, SolverSpec};
use nagfree_core::{rng, Objective};

fn spec_for(kind: SolverKind, iters: usize) -> SolverSpec {
    let spec = SolverSpec::new(kind, iters);
    match kind {
        SolverKind::NagFreeRestart => spec.restart_period(10),
        SolverKind::Gd | SolverKind::Nag | SolverKind::NagRestart => spec.step(1.0 / 100.0),
        _ => spec,
    }
}

#[test]
fn every_solver_makes_progress_on_a_small_quadratic() {
    let f = Quadratic::diagonal(&[1.0, 10.0, 100.0]).unwrap();
    let x0 = vec![1.0; 3];
    let f0 = f.value(&x0);
    for kind in SolverKind::ALL {
        let trace = run(&spec_for(kind, 300), &f, &x0, 1).unwrap();
        assert!(trace.is_well_formed(), "{}", kind.name());
        assert!(!trace.diverged, "{}", kind.name());
        assert_eq!(trace.records[0].t, 0);
        let last = trace.final_value().unwrap();
        assert!(last < 1e-3 * f0, "{}: {last} vs {f0}", kind.name());
    }
}

#[test]
fn reruns_are_identical_up_to_wall_time() {
    let mut r = rng::seeded(11);
    let f = random_quadratic(8, 1.0, 50.0, true, &mut r).unwrap();
    let x0 = vec![1.0; 8];
    for kind in SolverKind::ALL {
        let spec = spec_for(kind, 120);
        let a = run(&spec, &f, &x0, 4).unwrap();
        let b = run(&spec, &f, &x0, 4).unwrap();
        assert_eq!(a.records, b.records, "{}", kind.name());
    }
}

#[test]
fn sequential_and_parallel_execution_agree() {
    let f = Quadratic::diagonal(&[0.5, 3.0, 40.0, 200.0]).unwrap();
    let x0 = vec![1.0; 4];
    let seeds: Vec<u64> = (1..=6).collect();
    let spec = SolverSpec::new(SolverKind::NagFree, 200);
    let go = |exec: Execution| exec.map(&seeds, |&s| run(&spec, &f, &x0, s).unwrap().records);
    assert_eq!(go(Execution::Sequential), go(Execution::Parallel));
}

#[test]
fn estimates_stay_inside_the_spectrum() {
    let f = Quadratic::diagonal(&[2.0, 7.0, 30.0, 90.0]).unwrap();
    let trace = run(&SolverSpec::new(SolverKind::NagFree, 400), &f, &[1.0; 4], 3).unwrap();
    for r in &trace.records {
        if let Some(c) = r.c_t {
            assert!((2.0 * (1.0 - 1e-9)..=90.0 * (1.0 + 1e-9)).contains(&c), "c_t = {c}");
        }
    }
    let m: Vec<f64> = trace.records.iter().filter_map(|r| r.m_t).collect();
    assert!(m.windows(2).all(|w| w[1] <= w[0]));
}
