use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::objective::Objective;
use crate::vecops;

/// `gᵀx + ½xᵀHx + (η/6)‖x‖³`. Convex for PSD `H` but only locally smooth.
#[derive(Debug, Clone)]
pub struct CubicReg {
    g: Vec<f64>,
    h: Matrix,
    eta: f64,
}

pub fn cubic_reg_objective(g: Vec<f64>, h: Matrix, eta: f64) -> Result<CubicReg> {
    let d = g.len();
    if h.rows() != d || h.cols() != d {
        return Err(Error::Shape(format!(
            "H is {}x{}, g has length {d}",
            h.rows(),
            h.cols()
        )));
    }
    if !h.is_symmetric(1e-12 * (1.0 + h.frobenius_sq().sqrt())) {
        return Err(Error::Shape("H is not symmetric".into()));
    }
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::Domain(format!("eta={eta}")));
    }
    Ok(CubicReg { g, h, eta })
}

/// The regulariser weight `η = 10·L̄·n` for a problem built from `n`
/// observations, where `L̄ = λ_max(H)`.
pub fn cubic_eta_from_logistic(h: &Matrix, n: usize) -> f64 {
    let l_bar = linalg::top_eigenvalue_psd(h.cols(), 0x5eed, |v, out| h.matvec_into(v, out));
    10.0 * l_bar * n as f64
}

impl CubicReg {
    pub fn eta(&self) -> f64 {
        self.eta
    }
}

impl Objective for CubicReg {
    fn dim(&self) -> usize {
        self.g.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let hx = self.h.matvec(x);
        let r = vecops::norm(x);
        vecops::dot(&self.g, x) + 0.5 * vecops::dot(x, &hx) + self.eta / 6.0 * r * r * r
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        self.h.matvec_into(x, out);
        vecops::axpy(1.0, &self.g, out);
        vecops::axpy(0.5 * self.eta * vecops::norm(x), x, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{default_fd_step, finite_difference_gradient_check};
    use crate::rng;

    #[test]
    fn origin_returns_linear_term() {
        let f = cubic_reg_objective(vec![1.0, -2.0], Matrix::identity(2), 3.0).unwrap();
        assert_eq!(f.value(&[0.0, 0.0]), 0.0);
        assert_eq!(f.gradient(&[0.0, 0.0]), vec![1.0, -2.0]);
    }

    #[test]
    fn pure_cubic_term() {
        let f = cubic_reg_objective(vec![0.0, 0.0], Matrix::zeros(2, 2), 6.0).unwrap();
        assert_eq!(f.value(&[1.0, 0.0]), 1.0);
        assert_eq!(f.gradient(&[1.0, 0.0]), vec![3.0, 0.0]);
    }

    #[test]
    fn tiny_cubic_recovers_quadratic_minimizer() {
        let f = cubic_reg_objective(vec![-1.0, 0.0], Matrix::identity(2), 1e-12).unwrap();
        let g = f.gradient(&[1.0, 0.0]);
        assert!(vecops::norm(&g) < 1e-11);
    }

    #[test]
    fn gradient_check_at_random_points() {
        let mut r = rng::seeded(8);
        let b = Matrix::from_row_major(6, 6, rng::gaussian_vec(&mut r, 36)).unwrap();
        let f = cubic_reg_objective(rng::gaussian_vec(&mut r, 6), b.gram(), 2.0).unwrap();
        for _ in 0..10 {
            let x = rng::uniform_vec(&mut r, 6, -1.0, 1.0);
            assert!(finite_difference_gradient_check(&f, &x, default_fd_step(&x)).unwrap() <= 1e-5);
        }
    }
}
