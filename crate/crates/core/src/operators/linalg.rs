use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::vector::{Vector, MAX_DIM};

/// Square real matrix acting on [`Vector`]s.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix(DMatrix<f64>);

impl Matrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || n > MAX_DIM {
            return Err(Error::InvalidArgument(format!("matrix size {n} out of range")));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::InvalidArgument(format!(
                "matrix must be square: row of length {} in a {n}-row matrix",
                r.len()
            )));
        }
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("matrix entries must be finite".into()));
        }
        Ok(Matrix(DMatrix::from_fn(n, n, |i, j| rows[i][j])))
    }

    pub fn from_nalgebra(m: DMatrix<f64>) -> Result<Self> {
        let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn identity(n: usize) -> Self {
        Matrix(DMatrix::identity(n, n))
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.0.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    pub fn nrows(&self) -> usize {
        self.0.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.0.ncols()
    }

    pub fn as_nalgebra(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        x.expect_dim(self.0.ncols())?;
        Ok(Vector::from_fn(self.0.nrows(), |i| {
            (0..x.dim()).map(|j| self.0[(i, j)] * x[j]).sum()
        }))
    }
}

/// Largest singular value by power iteration on `MᵀM` with a fixed number of
/// steps from a fixed start vector.
pub fn spectral_norm(m: &DMatrix<f64>, steps: usize) -> f64 {
    let n = m.ncols();
    let gram = m.transpose() * m;
    // Fixed, generic start: not orthogonal to any coordinate axis.
    let mut x = DVector::from_fn(n, |i, _| 1.0 + 0.1 * (i as f64 + 1.0).sqrt());
    x /= x.norm();
    let mut lambda = 0.0;
    for _ in 0..steps {
        let y = &gram * &x;
        let ny = y.norm();
        if ny == 0.0 {
            return 0.0;
        }
        lambda = x.dot(&y);
        x = y / ny;
    }
    lambda = lambda.max(x.dot(&(&gram * &x)));
    lambda.max(0.0).sqrt()
}

pub(crate) fn max_singular_value(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Solution set of `M x = rhs` as (particular solution, orthonormal null
/// space basis), or `None` if the system is inconsistent.
pub(crate) fn solve_affine(m: &DMatrix<f64>, rhs: &Vector) -> Option<(Vector, Vec<Vector>)> {
    let n = m.ncols();
    let svd = m.clone().svd(true, true);
    let u = svd.u.as_ref()?;
    let v_t = svd.v_t.as_ref()?;
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = 1e-10 * smax.max(1.0);
    let b = DVector::from_iterator(n, rhs.as_slice().iter().copied());
    let mut x = DVector::zeros(n);
    let mut null = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        let vk = v_t.row(k).transpose();
        if s > cutoff {
            let coeff = u.column(k).dot(&b) / s;
            x += vk * coeff;
        } else {
            null.push(Vector::from_fn(n, |i| vk[i]));
        }
    }
    // nalgebra returns min(n, n) = n singular triplets for square input.
    let residual = (m * &x - &b).norm();
    if residual > 1e-9 * (1.0 + b.norm()) {
        return None;
    }
    Some((Vector::from_fn(n, |i| x[i]), null))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_iteration_matches_svd() {
        let m = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 0.0, 1.0, 0.5, 0.3, 0.0, 1.0]);
        let pi = spectral_norm(&m, 1000);
        assert!((pi - max_singular_value(&m)).abs() < 1e-10);
    }

    #[test]
    fn affine_solution_sets() {
        // x = y line: (1 -1; -1 1) x = 0.
        let m = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        let (x, null) = solve_affine(&m, &Vector::new(&[0.0, 0.0]).unwrap()).unwrap();
        assert!(x.norm() < 1e-14);
        assert_eq!(null.len(), 1);
        assert!((null[0][0].abs() - 0.5_f64.sqrt()).abs() < 1e-12);
        assert!(solve_affine(&m, &Vector::new(&[1.0, 1.0]).unwrap()).is_none());
    }

    #[test]
    fn matrix_shape_checks() {
        assert!(Matrix::from_rows(&[vec![1.0, 0.0]]).is_err());
        assert!(Matrix::from_rows(&[]).is_err());
        let m = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(
            m.apply(&Vector::new(&[1.0, 2.0]).unwrap()).unwrap().as_slice(),
            &[2.0, 1.0]
        );
    }
}
