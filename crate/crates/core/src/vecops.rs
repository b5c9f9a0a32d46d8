//! Dense vector arithmetic over `f64` slices.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// `‖a − b‖`
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `y ← y + alpha·x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// `x + alpha·d` as a new vector.
pub fn step(x: &[f64], alpha: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(xi, di)| xi + alpha * di).collect()
}

/// `(1+beta)·a − beta·b`, the momentum extrapolation used by every accelerated method here.
pub fn extrapolate(a: &[f64], b: &[f64], beta: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(ai, bi)| ai + beta * (ai - bi)).collect()
}

pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|x| x.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn norm_sq_matches_self_dot(v in prop::collection::vec(-1e3..1e3f64, 1..40)) {
            let lhs = norm_sq(&v);
            let rhs = dot(&v, &v);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.max(1e-300));
        }

        #[test]
        fn dist_is_norm_of_difference(
            a in prop::collection::vec(-10.0..10.0f64, 5),
            b in prop::collection::vec(-10.0..10.0f64, 5),
        ) {
            prop_assert!((dist(&a, &b) - norm(&sub(&a, &b))).abs() < 1e-12);
        }
    }

    #[test]
    fn extrapolate_zero_momentum_is_identity() {
        let a = [1.0, -2.0];
        assert_eq!(extrapolate(&a, &[5.0, 5.0], 0.0), a.to_vec());
        assert_eq!(extrapolate(&[1.0], &[0.0], 0.5), vec![1.5]);
    }
}
