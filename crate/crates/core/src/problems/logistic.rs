use super::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::objective::Objective;
use crate::vecops;

/// `log(1 + e^{−z})` without overflow.
#[inline]
pub fn softplus_neg(z: f64) -> f64 {
    if z >= 0.0 {
        (-z).exp().ln_1p()
    } else {
        -z + z.exp().ln_1p()
    }
}

/// Logistic function `1/(1 + e^{−z})`.
#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Ridge-regularised logistic loss `(1/n) Σ log(1 + exp(−b_i A_iᵀx)) + (η/2)‖x‖²`.
#[derive(Debug, Clone)]
pub struct Logistic {
    data: Dataset,
    eta: f64,
    l_bar: f64,
}

/// `λ_max(AᵀA)` for a sparse dataset.
pub fn gram_top_eigenvalue(data: &Dataset) -> f64 {
    let n = data.len();
    let mut av = vec![0.0; n];
    linalg::top_eigenvalue_psd(data.dim, 0x5eed, |v, out| {
        for (i, a) in av.iter_mut().enumerate() {
            *a = data.row_dot(i, v);
        }
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, a) in av.iter().enumerate() {
            data.row_axpy(i, *a, out);
        }
    })
}

pub fn logistic_objective(data: Dataset, eta: f64) -> Result<Logistic> {
    if data.is_empty() {
        return Err(Error::NoObservations);
    }
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(Error::Domain(format!("eta={eta}")));
    }
    let l_bar = gram_top_eigenvalue(&data) / (4.0 * data.len() as f64) + eta;
    Ok(Logistic { data, eta, l_bar })
}

impl Logistic {
    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

impl Objective for Logistic {
    fn dim(&self) -> usize {
        self.data.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        let n = self.data.len() as f64;
        let loss: f64 = (0..self.data.len())
            .map(|i| softplus_neg(self.data.labels[i] * self.data.row_dot(i, x)))
            .sum();
        loss / n + 0.5 * self.eta * vecops::norm_sq(x)
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.data.len() as f64;
        out.iter_mut().for_each(|o| *o = 0.0);
        for i in 0..self.data.len() {
            let b = self.data.labels[i];
            let w = -b * sigmoid(-b * self.data.row_dot(i, x)) / n;
            self.data.row_axpy(i, w, out);
        }
        vecops::axpy(self.eta, x, out);
    }

    fn smoothness_bound(&self) -> Option<f64> {
        Some(self.l_bar)
    }

    fn strong_convexity_bound(&self) -> Option<f64> {
        (self.eta > 0.0).then_some(self.eta)
    }
}

/// Gradient and Hessian of the unregularised logistic loss at the origin:
/// `g = −(1/2n) Σ b_i A_i`, `H = (1/4n) AᵀA`.
pub fn cubic_setup_from_logistic(data: &Dataset) -> Result<(Vec<f64>, Matrix)> {
    if data.is_empty() {
        return Err(Error::NoObservations);
    }
    let n = data.len() as f64;
    let mut g = vec![0.0; data.dim];
    for i in 0..data.len() {
        data.row_axpy(i, -data.labels[i] / (2.0 * n), &mut g);
    }
    let mut h = data.to_dense().gram();
    for i in 0..h.rows() {
        for j in 0..h.cols() {
            h[(i, j)] /= 4.0 * n;
        }
    }
    Ok((g, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{default_fd_step, finite_difference_gradient_check};
    use crate::problems::dataset::{parse_libsvm, synthetic_dataset};
    use crate::rng;
    use approx::assert_relative_eq;

    #[test]
    fn value_at_origin_is_log_two() {
        let f = logistic_objective(synthetic_dataset(25, 6, 0.5, 1), 0.3).unwrap();
        assert_relative_eq!(f.value(&[0.0; 6]), 2f64.ln(), max_relative = 1e-15);
    }

    #[test]
    fn gradient_at_origin_is_half_label_mean() {
        let data = synthetic_dataset(25, 6, 0.5, 2);
        let f = logistic_objective(data.clone(), 0.0).unwrap();
        let mut expected = vec![0.0; 6];
        for i in 0..data.len() {
            data.row_axpy(i, -data.labels[i] / (2.0 * data.len() as f64), &mut expected);
        }
        for (a, b) in f.gradient(&[0.0; 6]).iter().zip(&expected) {
            assert_relative_eq!(a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn loss_vanishes_along_separating_direction() {
        let f = logistic_objective(parse_libsvm("+1 1:1\n").unwrap(), 0.0).unwrap();
        let mut prev = f.value(&[0.0]);
        for k in 1..40 {
            let v = f.value(&[k as f64]);
            assert!(v < prev);
            prev = v;
        }
        assert!(prev < 1e-16);
        assert!(f.value(&[800.0]) >= 0.0);
    }

    #[test]
    fn stable_at_extreme_margins() {
        assert_eq!(softplus_neg(1e4), 0.0);
        assert_eq!(softplus_neg(-1e4), 1e4);
        assert_eq!(sigmoid(-1e4), 0.0);
        assert_eq!(sigmoid(1e4), 1.0);
    }

    #[test]
    fn gradient_check_at_random_points() {
        let f = logistic_objective(synthetic_dataset(40, 8, 0.5, 5), 0.01).unwrap();
        let mut r = rng::seeded(21);
        for _ in 0..10 {
            let x = rng::uniform_vec(&mut r, 8, -3.0, 3.0);
            assert!(finite_difference_gradient_check(&f, &x, default_fd_step(&x)).unwrap() <= 1e-5);
        }
    }

    #[test]
    fn cubic_setup_single_point() {
        let (g, h) = cubic_setup_from_logistic(&parse_libsvm("+1 1:1\n").unwrap()).unwrap();
        assert_eq!(g, vec![-0.5]);
        assert_eq!(h.as_slice(), &[0.25]);
    }

    #[test]
    fn cubic_setup_balanced_labels_cancel() {
        let (g, _) = cubic_setup_from_logistic(&parse_libsvm("+1 1:2 2:1\n-1 1:2 2:1\n").unwrap()).unwrap();
        assert_eq!(g, vec![0.0, 0.0]);
    }

    #[test]
    fn cubic_setup_unit_rows() {
        let (_, h) = cubic_setup_from_logistic(&parse_libsvm("+1 1:1\n-1 2:1\n").unwrap()).unwrap();
        assert_eq!(h.as_slice(), &[0.125, 0.0, 0.0, 0.125]);
    }
}
