//! General complex eigendecomposition: complex Schur form followed by
//! triangular back-substitution for the right eigenvectors.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) struct GeneralEigen {
    pub values: Vec<Complex64>,
    /// Unit-norm right eigenvectors, one per column, in the order of `values`.
    pub vectors: DMatrix<Complex64>,
}

pub(crate) fn general_eigen(m: &DMatrix<Complex64>) -> Result<GeneralEigen> {
    let n = m.nrows();
    let schur =
        Schur::try_new(m.clone(), f64::EPSILON, 100 * n.max(10)).ok_or(Error::NoConvergence)?;
    let (q, t) = schur.unpack();

    let scale = t
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let smin = (f64::EPSILON * scale).max(f64::MIN_POSITIVE);
    let degenerate = 1e-12 * scale;

    let values: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for k in 0..n {
        let mut y = DVector::<Complex64>::zeros(n);
        y[k] = Complex64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut num = Complex64::new(0.0, 0.0);
            for l in (j + 1)..=k {
                num += t[(j, l)] * y[l];
            }
            let mut denom = t[(j, j)] - t[(k, k)];
            if denom.norm() < degenerate {
                let ymax = y.iter().map(|z| z.norm()).fold(0.0, f64::max);
                if num.norm() <= degenerate * ymax {
                    // eigenvalue repeated inside a diagonal block: pick the
                    // eigenvector that does not mix in component j
                    y[j] = Complex64::new(0.0, 0.0);
                    continue;
                }
                if denom.norm() < smin {
                    denom = Complex64::new(smin, 0.0);
                }
            }
            y[j] = -num / denom;
        }
        let x = &q * y;
        let norm = x.norm();
        vectors.set_column(k, &(x / Complex64::new(norm, 0.0)));
    }
    Ok(GeneralEigen { values, vectors })
}
