//! Small dense row-major matrices and the power iteration used for
//! smoothness bounds.

use crate::error::{Error, Result};
use crate::rng;
use crate::vecops;
use rand::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// `out ← A v`
    pub fn matvec_into(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.cols);
        for (o, row) in out.iter_mut().zip(self.data.chunks_exact(self.cols.max(1))) {
            *o = vecops::dot(row, v);
        }
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        self.matvec_into(v, &mut out);
        out
    }

    /// `out ← Aᵀ v`
    pub fn matvec_t_into(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.rows);
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, vi) in v.iter().enumerate() {
            vecops::axpy(*vi, self.row(i), out);
        }
    }

    pub fn matvec_t(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        self.matvec_t_into(v, &mut out);
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, a) in self.row(i).iter().enumerate() {
                if *a != 0.0 {
                    vecops::axpy(*a, other.row(k), dst);
                }
            }
        }
        Ok(out)
    }

    /// `AᵀA`
    pub fn gram(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.cols);
        for i in 0..self.rows {
            let r = self.row(i);
            for (j, a) in r.iter().enumerate() {
                if *a != 0.0 {
                    vecops::axpy(*a, r, &mut out.data[j * self.cols..(j + 1) * self.cols]);
                }
            }
        }
        out
    }

    pub fn frobenius_sq(&self) -> f64 {
        vecops::norm_sq(&self.data)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows == self.cols && (0..self.rows).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }

    /// Largest entry of `|QᵀQ − I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.gram();
        let mut worst = 0.0_f64;
        for i in 0..g.rows {
            for j in 0..g.cols {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub const POWER_ITERS: usize = 200;
pub const POWER_TOL: f64 = 1e-10;

/// Top eigenvalue of a symmetric positive semidefinite operator by power
/// iteration from a seeded random start.
///
/// Stops after [`POWER_ITERS`] steps or when the Rayleigh quotient changes by
/// less than [`POWER_TOL`] relative.
pub fn top_eigenvalue_psd(dim: usize, seed: u64, mut apply: impl FnMut(&[f64], &mut [f64])) -> f64 {
    if dim == 0 {
        return 0.0;
    }
    let mut rng = rng::seeded(seed);
    let mut v: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() + 0.5).collect();
    let n = vecops::norm(&v);
    v.iter_mut().for_each(|x| *x /= n);
    let mut w = vec![0.0; dim];
    let mut lambda = 0.0;
    for _ in 0..POWER_ITERS {
        apply(&v, &mut w);
        let next = vecops::dot(&v, &w);
        let wn = vecops::norm(&w);
        if wn == 0.0 {
            return 0.0;
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / wn;
        }
        let done = (next - lambda).abs() <= POWER_TOL * next.abs();
        lambda = next;
        if done {
            break;
        }
    }
    // One final Rayleigh quotient on the normalized iterate.
    apply(&v, &mut w);
    lambda.max(vecops::dot(&v, &w))
}

/// `σ_max(A)²`, i.e. `λ_max(AᵀA)`, without forming `AᵀA`.
pub fn sigma_max_sq(a: &Matrix, seed: u64) -> f64 {
    let mut tmp = vec![0.0; a.rows()];
    top_eigenvalue_psd(a.cols(), seed, |v, out| {
        a.matvec_into(v, &mut tmp);
        a.matvec_t_into(&tmp, out);
    })
}

/// A Haar-ish random orthonormal basis from Gram-Schmidt on Gaussian columns.
pub fn random_orthonormal(d: usize, rng: &mut impl Rng) -> Matrix {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v = rng::gaussian_vec(rng, d);
        for _ in 0..2 {
            for c in &cols {
                let p = vecops::dot(&v, c);
                vecops::axpy(-p, c, &mut v);
            }
        }
        let n = vecops::norm(&v);
        if n > 1e-8 {
            v.iter_mut().for_each(|x| *x /= n);
            cols.push(v);
        }
    }
    Matrix::from_fn(d, d, |i, j| cols[j][i])
}
