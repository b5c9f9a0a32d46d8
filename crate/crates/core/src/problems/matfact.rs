use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::objective::Objective;
use crate::rng;

/// `½‖UVᵀ − A‖_F²` over the stacked variable `(vec U, vec V)`, with `U`
/// (`p×r`) and `V` (`q×r`) stored row-major.
#[derive(Debug, Clone)]
pub struct MatrixFactorization {
    a: Matrix,
    rank: usize,
}

pub fn matrix_factorization_objective(a: Matrix, rank: usize) -> Result<MatrixFactorization> {
    let (p, q) = (a.rows(), a.cols());
    if rank == 0 || rank >= p.min(q) {
        return Err(Error::Shape(format!("rank {rank} must be in [1, min({p},{q}))")));
    }
    Ok(MatrixFactorization { a, rank })
}

impl MatrixFactorization {
    pub fn target(&self) -> &Matrix {
        &self.a
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn split(&self, x: &[f64]) -> (Matrix, Matrix) {
        let (p, q, r) = (self.a.rows(), self.a.cols(), self.rank);
        let u = Matrix::from_row_major(p, r, x[..p * r].to_vec()).expect("sized");
        let v = Matrix::from_row_major(q, r, x[p * r..].to_vec()).expect("sized");
        (u, v)
    }

    pub fn stack(u: &Matrix, v: &Matrix) -> Vec<f64> {
        [u.as_slice(), v.as_slice()].concat()
    }

    /// `UVᵀ − A`
    fn residual(&self, u: &Matrix, v: &Matrix) -> Matrix {
        let mut r = u.matmul(&v.transpose()).expect("conformable");
        for i in 0..r.rows() {
            for j in 0..r.cols() {
                r[(i, j)] -= self.a[(i, j)];
            }
        }
        r
    }
}

impl Objective for MatrixFactorization {
    fn dim(&self) -> usize {
        (self.a.rows() + self.a.cols()) * self.rank
    }

    fn value(&self, x: &[f64]) -> f64 {
        let (u, v) = self.split(x);
        0.5 * self.residual(&u, &v).frobenius_sq()
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        let (u, v) = self.split(x);
        let r = self.residual(&u, &v);
        let gu = r.matmul(&v).expect("conformable");
        let gv = r.transpose().matmul(&u).expect("conformable");
        let split = gu.as_slice().len();
        out[..split].copy_from_slice(gu.as_slice());
        out[split..].copy_from_slice(gv.as_slice());
    }
}

/// Dense `p×q` matrix from header-less `user,item,rating` lines (1-based
/// ids); unobserved entries are zero. Dimensions default to the largest ids.
pub fn parse_ratings_csv(text: &str, shape: Option<(usize, usize)>) -> Result<Matrix> {
    let mut triples = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let perr = |msg: &str| Error::Parse {
            line: lineno + 1,
            msg: format!("{msg}: {line:?}"),
        };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(perr("expected user,item,rating"));
        }
        let u: usize = fields[0].parse().map_err(|_| perr("bad user id"))?;
        let i: usize = fields[1].parse().map_err(|_| perr("bad item id"))?;
        let r: f64 = fields[2].parse().map_err(|_| perr("bad rating"))?;
        if u == 0 || i == 0 {
            return Err(perr("ids are 1-based"));
        }
        triples.push((u - 1, i - 1, r));
    }
    if triples.is_empty() {
        return Err(Error::NoObservations);
    }
    let (p, q) = shape.unwrap_or_else(|| {
        let p = triples.iter().map(|t| t.0).max().unwrap_or(0) + 1;
        let q = triples.iter().map(|t| t.1).max().unwrap_or(0) + 1;
        (p, q)
    });
    let mut a = Matrix::zeros(p, q);
    for (u, i, r) in triples {
        if u >= p || i >= q {
            return Err(Error::Shape(format!("entry ({}, {}) outside {p}x{q}", u + 1, i + 1)));
        }
        a[(u, i)] = r;
    }
    Ok(a)
}

/// Seeded `p×q` target of exact rank `r` plus Gaussian noise of scale `noise`.
pub fn synthetic_low_rank(p: usize, q: usize, r: usize, noise: f64, seed: u64) -> Matrix {
    let mut g = rng::seeded(seed);
    let u = Matrix::from_row_major(p, r, rng::gaussian_vec(&mut g, p * r)).expect("sized");
    let v = Matrix::from_row_major(q, r, rng::gaussian_vec(&mut g, q * r)).expect("sized");
    let mut a = u.matmul(&v.transpose()).expect("conformable");
    let eps = rng::gaussian_vec(&mut g, p * q);
    for i in 0..p {
        for j in 0..q {
            a[(i, j)] += noise * eps[i * q + j];
        }
    }
    a
}

/// Seeded uniform start in `[0, 0.1]`, away from the saddle at the origin.
pub fn default_start(obj: &MatrixFactorization, seed: u64) -> Vec<f64> {
    rng::uniform_vec(&mut rng::stream(seed, 0x3f), obj.dim(), 0.0, 0.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{default_fd_step, finite_difference_gradient_check};
    use crate::vecops;

    #[test]
    fn origin_is_a_saddle() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0, 0.0], vec![0.0, 1.0, 3.0]]).unwrap();
        let f = matrix_factorization_objective(a.clone(), 1).unwrap();
        let x = vec![0.0; f.dim()];
        assert_eq!(f.value(&x), 0.5 * a.frobenius_sq());
        assert!(f.gradient(&x).iter().all(|g| *g == 0.0));
    }

    #[test]
    fn exact_rank_one_factorization() {
        let (u, v) = ([1.0, 2.0, -1.0], [0.5, 3.0, 1.0, 2.0]);
        let a = Matrix::from_fn(3, 4, |i, j| u[i] * v[j]);
        let f = matrix_factorization_objective(a, 1).unwrap();
        let x = [u.as_slice(), v.as_slice()].concat();
        assert_eq!(f.value(&x), 0.0);
    }

    #[test]
    fn exact_factorization_of_diagonal() {
        let f = matrix_factorization_objective(Matrix::diag(&[1.0, 0.0]), 1).unwrap();
        let x = [1.0, 0.0, 1.0, 0.0];
        assert_eq!(f.value(&x), 0.0);
        assert_eq!(f.gradient(&x), vec![0.0; 4]);
    }

    #[test]
    fn rank_must_be_below_min_dimension() {
        assert!(matches!(
            matrix_factorization_objective(Matrix::zeros(2, 3), 2),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn gradient_check_at_random_points() {
        let f = matrix_factorization_objective(synthetic_low_rank(5, 7, 2, 0.1, 3), 2).unwrap();
        for s in 0..10 {
            let x = default_start(&f, s);
            assert!(finite_difference_gradient_check(&f, &x, default_fd_step(&x)).unwrap() <= 1e-5);
        }
    }

    #[test]
    fn ratings_csv_fills_dense_matrix() {
        let a = parse_ratings_csv("1,1,5\n2,3,4\n", None).unwrap();
        assert_eq!((a.rows(), a.cols()), (2, 3));
        assert_eq!(a[(1, 2)], 4.0);
        assert_eq!(vecops::norm_sq(a.as_slice()), 41.0);
        assert!(matches!(
            parse_ratings_csv("1,x,5\n", None),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
