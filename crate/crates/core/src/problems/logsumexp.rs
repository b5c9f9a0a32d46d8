use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::objective::Objective;
use crate::rng;
use crate::vecops;

/// Smoothed max with ridge: `θ·log Σ exp((A_iᵀx − b_i)/θ) + (η/2)‖x‖²`.
#[derive(Debug, Clone)]
pub struct LogSumExp {
    a: Matrix,
    b: Vec<f64>,
    theta: f64,
    eta: f64,
    l_bar: f64,
}

pub fn log_sum_exp_objective(a: Matrix, b: Vec<f64>, theta: f64, eta: f64) -> Result<LogSumExp> {
    if a.rows() == 0 {
        return Err(Error::NoObservations);
    }
    if b.len() != a.rows() {
        return Err(Error::Shape(format!(
            "b has length {}, A has {} rows",
            b.len(),
            a.rows()
        )));
    }
    if !(theta > 0.0) || !(eta >= 0.0) || !theta.is_finite() || !eta.is_finite() {
        return Err(Error::Domain(format!("theta={theta}, eta={eta}")));
    }
    let l_bar = (1.0 + 1.0 / theta) * linalg::sigma_max_sq(&a, 0x5eed) + eta;
    Ok(LogSumExp {
        a,
        b,
        theta,
        eta,
        l_bar,
    })
}

/// Gaussian `A` and `b` with unit-variance entries.
pub fn random_log_sum_exp(n: usize, d: usize, theta: f64, eta: f64, seed: u64) -> Result<LogSumExp> {
    let mut r = rng::seeded(seed);
    let a = Matrix::from_row_major(n, d, rng::gaussian_vec(&mut r, n * d))?;
    let b = rng::gaussian_vec(&mut r, n);
    log_sum_exp_objective(a, b, theta, eta)
}

impl LogSumExp {
    fn scaled_residuals(&self, x: &[f64]) -> Vec<f64> {
        let mut z = self.a.matvec(x);
        for (zi, bi) in z.iter_mut().zip(&self.b) {
            *zi = (*zi - bi) / self.theta;
        }
        z
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

impl Objective for LogSumExp {
    fn dim(&self) -> usize {
        self.a.cols()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let z = self.scaled_residuals(x);
        let zmax = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let s: f64 = z.iter().map(|zi| (zi - zmax).exp()).sum();
        self.theta * (zmax + s.ln()) + 0.5 * self.eta * vecops::norm_sq(x)
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        let mut p = self.scaled_residuals(x);
        let zmax = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut s = 0.0;
        for pi in p.iter_mut() {
            *pi = (*pi - zmax).exp();
            s += *pi;
        }
        p.iter_mut().for_each(|pi| *pi /= s);
        self.a.matvec_t_into(&p, out);
        vecops::axpy(self.eta, x, out);
    }

    fn smoothness_bound(&self) -> Option<f64> {
        Some(self.l_bar)
    }

    fn strong_convexity_bound(&self) -> Option<f64> {
        (self.eta > 0.0).then_some(self.eta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{default_fd_step, finite_difference_gradient_check};
    use approx::assert_relative_eq;

    #[test]
    fn single_zero_row() {
        let f = log_sum_exp_objective(Matrix::zeros(1, 1), vec![0.0], 1.0, 1.0).unwrap();
        assert_eq!(f.value(&[0.0]), 0.0);
        assert_eq!(f.gradient(&[0.0]), vec![0.0]);
    }

    #[test]
    fn symmetric_pair_gives_log_two() {
        let a = Matrix::from_rows(&[vec![1.0], vec![-1.0]]).unwrap();
        let f = log_sum_exp_objective(a, vec![0.0, 0.0], 1.0, 0.0).unwrap();
        assert_relative_eq!(f.value(&[0.0]), 2f64.ln(), max_relative = 1e-15);
        assert_eq!(f.gradient(&[0.0]), vec![0.0]);
    }

    #[test]
    fn smoothness_bound_on_identity() {
        let f = log_sum_exp_objective(Matrix::identity(2), vec![0.0; 2], 0.1, 0.1).unwrap();
        assert_relative_eq!(f.smoothness_bound().unwrap(), 11.1, max_relative = 1e-10);
        assert_eq!(f.strong_convexity_bound(), Some(0.1));
    }

    #[test]
    fn empty_data_is_rejected() {
        let e = log_sum_exp_objective(Matrix::zeros(0, 3), vec![], 1.0, 1.0).unwrap_err();
        assert_eq!(e, Error::NoObservations);
    }

    #[test]
    fn large_residuals_do_not_overflow() {
        let f = log_sum_exp_objective(Matrix::identity(2), vec![0.0; 2], 1e-3, 0.0).unwrap();
        let v = f.value(&[1e3, 0.0]);
        assert_relative_eq!(v, 1e3, max_relative = 1e-12);
        assert!(vecops::all_finite(&f.gradient(&[1e3, 0.0])));
    }

    #[test]
    fn gradient_check_at_origin_and_random_points() {
        let f = random_log_sum_exp(30, 10, 0.1, 0.1, 4).unwrap();
        assert!(finite_difference_gradient_check(&f, &[0.0; 10], 1e-6).unwrap() <= 1e-5);
        let mut r = rng::seeded(9);
        for _ in 0..10 {
            let x = rng::uniform_vec(&mut r, 10, -1.0, 1.0);
            assert!(finite_difference_gradient_check(&f, &x, default_fd_step(&x)).unwrap() <= 1e-5);
        }
    }
}
