//! Dense linear-algebra kernels for desk-scale matrices: spectral norms with
//! closed forms in the 1x1/2x2 cases, symmetric eigenvalue extremes, and
//! integer matrix powers.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::DMatrix;

use crate::error::{Error, Result};

const EIGEN_EPS: f64 = 1e-13;
const EIGEN_MAX_ITER: usize = 10_000;

/// Largest singular value. 1x1 and 2x2 use closed forms; larger matrices go
/// through a guarded symmetric eigendecomposition of M^T M.
pub fn spectral_norm(m: &DMatrix<f64>) -> Result<f64> {
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("spectral norm of a non-finite matrix".into()));
    }
    if m.nrows() == 1 && m.ncols() == 1 {
        return Ok(m[(0, 0)].abs());
    }
    if m.nrows() == 2 && m.ncols() == 2 {
        // lambda_max(M^T M) = (t + sqrt(t^2 - 4 d)) / 2 with t the squared
        // Frobenius norm and d = det(M)^2.
        let t = m.iter().map(|x| x * x).sum::<f64>();
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        let d = det * det;
        let disc = (t * t - 4.0 * d).max(0.0);
        return Ok(((t + disc.sqrt()) / 2.0).sqrt());
    }
    let gram = m.transpose() * m;
    Ok(max_eigenvalue_sym(&gram)?.max(0.0).sqrt())
}

/// Integer power by repeated multiplication; `p = 0` yields the identity.
pub fn matrix_power(m: &DMatrix<f64>, p: usize) -> DMatrix<f64> {
    let mut acc = DMatrix::identity(m.nrows(), m.ncols());
    for _ in 0..p {
        acc = &acc * m;
    }
    acc
}

fn sym_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(sym, EIGEN_EPS, EIGEN_MAX_ITER).ok_or_else(|| {
        Error::Numeric(format!(
            "symmetric eigendecomposition did not converge within {EIGEN_MAX_ITER} iterations"
        ))
    })?;
    if eig.eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numeric(
            "symmetric eigendecomposition produced non-finite eigenvalues".into(),
        ));
    }
    Ok(eig.eigenvalues.iter().copied().collect())
}

/// Smallest eigenvalue of a (numerically symmetrized) matrix.
pub fn min_eigenvalue_sym(m: &DMatrix<f64>) -> Result<f64> {
    Ok(sym_eigenvalues(m)?.into_iter().fold(f64::INFINITY, f64::min))
}

/// Largest eigenvalue of a (numerically symmetrized) matrix.
pub fn max_eigenvalue_sym(m: &DMatrix<f64>) -> Result<f64> {
    Ok(sym_eigenvalues(m)?.into_iter().fold(f64::NEG_INFINITY, f64::max))
}
