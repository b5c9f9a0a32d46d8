use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::objective::{GroundTruth, Objective};
use crate::rng;
use rand::Rng;

/// Hessian spectrum (ascending), minimizer, and optional orthonormal eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticSpec {
    pub eigenvalues: Vec<f64>,
    pub x_star: Option<Vec<f64>>,
    pub basis: Option<Matrix>,
}

impl QuadraticSpec {
    pub fn diagonal(eigenvalues: Vec<f64>) -> Self {
        Self {
            eigenvalues,
            x_star: None,
            basis: None,
        }
    }

    pub fn with_x_star(mut self, x_star: Vec<f64>) -> Self {
        self.x_star = Some(x_star);
        self
    }

    pub fn with_basis(mut self, basis: Matrix) -> Self {
        self.basis = Some(basis);
        self
    }
}

/// `f(x) = ½(x−x*)ᵀ Q Λ Qᵀ (x−x*)`.
#[derive(Debug, Clone)]
pub struct Quadratic {
    eigenvalues: Vec<f64>,
    basis: Option<Matrix>,
    truth: GroundTruth,
}

pub fn quadratic_from_spectrum(spec: QuadraticSpec) -> Result<Quadratic> {
    let QuadraticSpec {
        eigenvalues,
        x_star,
        basis,
    } = spec;
    let d = eigenvalues.len();
    if d == 0 {
        return Err(Error::Shape("empty spectrum".into()));
    }
    if eigenvalues.iter().any(|l| !l.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    if eigenvalues.iter().any(|&l| l <= 0.0) {
        return Err(Error::NotStronglyConvex);
    }
    if eigenvalues.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Shape("eigenvalues must be sorted ascending".into()));
    }
    let x_star = x_star.unwrap_or_else(|| vec![0.0; d]);
    if x_star.len() != d {
        return Err(Error::Shape(format!(
            "x_star has length {}, expected {d}",
            x_star.len()
        )));
    }
    if let Some(q) = &basis {
        if q.rows() != d || q.cols() != d {
            return Err(Error::Shape(format!(
                "basis is {}x{}, expected {d}x{d}",
                q.rows(),
                q.cols()
            )));
        }
        if q.orthonormality_defect() > 1e-10 {
            return Err(Error::Shape("basis columns are not orthonormal".into()));
        }
    }
    Ok(Quadratic {
        eigenvalues,
        basis,
        truth: GroundTruth { f_star: 0.0, x_star },
    })
}

impl Quadratic {
    /// Diagonal quadratic with minimizer at the origin.
    pub fn diagonal(eigenvalues: &[f64]) -> Result<Self> {
        quadratic_from_spectrum(QuadraticSpec::diagonal(eigenvalues.to_vec()))
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Coordinates of `x − x*` in the eigenbasis.
    pub fn modal_coordinates(&self, x: &[f64]) -> Vec<f64> {
        let e: Vec<f64> = x.iter().zip(&self.truth.x_star).map(|(a, b)| a - b).collect();
        match &self.basis {
            Some(q) => q.matvec_t(&e),
            None => e,
        }
    }
}

impl Objective for Quadratic {
    fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let u = self.modal_coordinates(x);
        0.5 * u.iter().zip(&self.eigenvalues).map(|(ui, l)| l * ui * ui).sum::<f64>()
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        match &self.basis {
            None => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = self.eigenvalues[i] * (x[i] - self.truth.x_star[i]);
                }
            }
            Some(q) => {
                let mut u = self.modal_coordinates(x);
                u.iter_mut().zip(&self.eigenvalues).for_each(|(ui, l)| *ui *= l);
                q.matvec_into(&u, out);
            }
        }
    }

    fn smoothness_bound(&self) -> Option<f64> {
        self.eigenvalues.last().copied()
    }

    fn strong_convexity_bound(&self) -> Option<f64> {
        self.eigenvalues.first().copied()
    }

    fn ground_truth(&self) -> Option<&GroundTruth> {
        Some(&self.truth)
    }

    fn spectrum(&self) -> Option<&[f64]> {
        Some(&self.eigenvalues)
    }
}

/// Random quadratic in dimension `d` with a spectrum log-uniform in
/// `[lo, hi]`, optionally rotated by a random orthonormal basis and shifted
/// to a random minimizer.
pub fn random_quadratic(d: usize, lo: f64, hi: f64, rotated: bool, rng: &mut impl Rng) -> Result<Quadratic> {
    let mut eigs = rng::log_uniform_vec(rng, d, lo, hi);
    eigs.sort_by(f64::total_cmp);
    let x_star = rng::uniform_vec(rng, d, -1.0, 1.0);
    let mut spec = QuadraticSpec::diagonal(eigs).with_x_star(x_star);
    if rotated {
        spec = spec.with_basis(linalg::random_orthonormal(d, rng));
    }
    quadratic_from_spectrum(spec)
}
