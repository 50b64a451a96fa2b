//! Matrix functions of Hermitian operators, computed through a unitary
//! eigendecomposition `M = U D U†`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::Operator;
use crate::tolerance::Tolerance;

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

impl HermitianEigen {
    /// Decomposes `(M + M†)/2`; callers validate Hermiticity themselves.
    pub fn of_hermitian_part(m: &Operator) -> Self {
        let herm = m.hermitian_part().into_matrix();
        let eig = SymmetricEigen::new(herm);
        let n = eig.eigenvalues.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Self { values, vectors }
    }

    pub fn new(m: &Operator, tol: &Tolerance) -> Result<Self> {
        m.require_hermitian("matrix", tol)?;
        Ok(Self::of_hermitian_part(m))
    }

    /// `U f(D) U†`, symmetrized so the result is exactly Hermitian.
    pub fn apply(&self, mut f: impl FnMut(f64) -> f64) -> Operator {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &lambda) in self.values.iter().enumerate() {
            let fj = Complex64::new(f(lambda), 0.0);
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        let out = &scaled * self.vectors.adjoint();
        Operator::from_matrix_unchecked(out).hermitian_part()
    }

    /// Change of basis into the eigenbasis: `U† M U`.
    pub fn to_eigenbasis(&self, m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        self.vectors.adjoint() * m * &self.vectors
    }

    pub fn from_eigenbasis(&self, m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        &self.vectors * m * self.vectors.adjoint()
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::NAN)
    }
}

/// `e^(−Q)` for Hermitian `Q`.
pub fn herm_exp(q: &Operator, tol: &Tolerance) -> Result<Operator> {
    let eig = HermitianEigen::new(q, tol)?;
    Ok(eig.apply(|x| (-x).exp()))
}

/// Square root and inverse square root of a Hermitian positive-definite `M`.
pub fn herm_sqrt_inv(m: &Operator, tol: &Tolerance) -> Result<(Operator, Operator)> {
    let eig = HermitianEigen::new(m, tol)?;
    let lo = eig.min();
    if lo.is_nan() || lo <= tol.abs_tol {
        return Err(Error::Positivity { eigenvalue: lo });
    }
    Ok((eig.apply(f64::sqrt), eig.apply(|x| 1.0 / x.sqrt())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn exp_of_zero_and_diagonal() {
        let e = herm_exp(&Operator::zeros(3), &tol()).unwrap();
        assert_eq!(e.max_diff(&Operator::identity(3)), 0.0);

        let q = Operator::real_diagonal(&[2f64.ln(), 0.0]).unwrap();
        let e = herm_exp(&q, &tol()).unwrap();
        let expected = Operator::real_diagonal(&[0.5, 1.0]).unwrap();
        assert!(e.max_diff(&expected) < 1e-15);
    }

    #[test]
    fn exp_of_offdiagonal_generator() {
        let a = 3f64.ln();
        let q = Operator::from_real_rows(&[vec![0.0, a], vec![a, 0.0]]).unwrap();
        let e = herm_exp(&q, &tol()).unwrap();
        let values = HermitianEigen::new(&e, &tol()).unwrap().values;
        assert!((values[0] - 1.0 / 3.0).abs() < 1e-14);
        assert!((values[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn exp_rejects_non_hermitian() {
        let m = Operator::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(
            herm_exp(&m, &tol()),
            Err(Error::Structure {
                expected: "Hermitian",
                ..
            })
        ));
    }

    #[test]
    fn sqrt_examples() {
        let (s, si) = herm_sqrt_inv(&Operator::identity(2), &tol()).unwrap();
        assert!(s.max_diff(&Operator::identity(2)) < 1e-15);
        assert!(si.max_diff(&Operator::identity(2)) < 1e-15);

        let (s, si) =
            herm_sqrt_inv(&Operator::real_diagonal(&[4.0, 9.0]).unwrap(), &tol()).unwrap();
        assert!(s.max_diff(&Operator::real_diagonal(&[2.0, 3.0]).unwrap()) < 1e-15);
        assert!(si.max_diff(&Operator::real_diagonal(&[0.5, 1.0 / 3.0]).unwrap()) < 1e-15);

        let m = Operator::from_real_rows(&[vec![1.0, -1.0], vec![-1.0, 2.0]]).unwrap();
        let (s, _) = herm_sqrt_inv(&m, &tol()).unwrap();
        assert!((&s * &s).max_diff(&m) < 1e-12);
    }

    #[test]
    fn sqrt_reports_offending_eigenvalue() {
        let m = Operator::real_diagonal(&[1.0, -0.5]).unwrap();
        match herm_sqrt_inv(&m, &tol()) {
            Err(Error::Positivity { eigenvalue }) => assert_eq!(eigenvalue, -0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn exp_is_positive_definite(seed in any::<u64>(), n in 1usize..7, scale in 0.01f64..5.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let q = random::hermitian(n, &mut rng).scale(scale);
            let e = herm_exp(&q, &tol()).unwrap();
            prop_assert!(HermitianEigen::new(&e, &tol()).unwrap().min() > 0.0);
        }

        #[test]
        fn sqrt_reconstructs_well_conditioned_input(seed in any::<u64>(), n in 1usize..8, log_cond in 0.0f64..6.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random::positive_definite(n, 10f64.powf(log_cond), &mut rng);
            let (s, si) = herm_sqrt_inv(&m, &tol()).unwrap();
            let scale = m.max_norm();
            prop_assert!((&s * &s).max_diff(&m) <= 1e-10 * scale.max(1.0));
            prop_assert!((&s * &si).max_diff(&Operator::identity(n)) <= 1e-10);
        }
    }
}
