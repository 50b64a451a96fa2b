//! `[H₀, Q] = R` for Hermitian `H₀`, solved by division in the eigenbasis
//! of `H₀`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::functions::HermitianEigen;
use crate::operator::Operator;
use crate::tolerance::Tolerance;

/// Eigendecomposition of `H₀` reused across orders.
#[derive(Debug, Clone)]
pub struct CommutatorSolver {
    eig: HermitianEigen,
    tol: Tolerance,
}

#[derive(Debug, Clone)]
pub struct SylvesterSolution {
    pub q: Operator,
    /// Eigenbasis entries `(m, n)` with `E_m = E_n`, left at zero.
    pub degenerate_entries: usize,
}

impl CommutatorSolver {
    pub fn new(h0: &Operator, tol: &Tolerance) -> Result<Self> {
        Ok(Self {
            eig: HermitianEigen::new(h0, tol)?,
            tol: *tol,
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eig.values
    }

    /// Minimal-norm Hermitian `Q`: `Q_mn = R_mn / (E_m − E_n)` off the
    /// degenerate blocks, zero inside them.
    pub fn solve(&self, r: &Operator) -> Result<SylvesterSolution> {
        if r.dim() != self.eig.values.len() {
            return Err(Error::Shape {
                left: self.eig.values.len(),
                right: r.dim(),
            });
        }
        r.require_anti_hermitian("commutator source", &self.tol)?;
        let e = &self.eig.values;
        let rt = self.eig.to_eigenbasis(r.matrix());
        let n = e.len();
        let solvability = self.tol.threshold(r.max_norm());
        let mut degenerate_entries = 0;
        let mut qt = DMatrix::<Complex64>::zeros(n, n);
        for col in 0..n {
            for row in 0..n {
                let gap = e[row] - e[col];
                if gap.abs() <= self.tol.abs_tol {
                    let element = rt[(row, col)].norm();
                    if element > solvability {
                        return Err(Error::Obstruction {
                            row,
                            col,
                            gap: gap.abs(),
                            element,
                        });
                    }
                    degenerate_entries += 1;
                } else {
                    qt[(row, col)] = rt[(row, col)] / gap;
                }
            }
        }
        let q = Operator::from_matrix_unchecked(self.eig.from_eigenbasis(&qt)).hermitian_part();
        Ok(SylvesterSolution {
            q,
            degenerate_entries,
        })
    }
}

pub fn sylvester_solve(h0: &Operator, r: &Operator, tol: &Tolerance) -> Result<Operator> {
    h0.ensure_same_dim(r)?;
    Ok(CommutatorSolver::new(h0, tol)?.solve(r)?.q)
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

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn two_level_example() {
        let h0 = Operator::real_diagonal(&[1.0, 2.0]).unwrap();
        let r = Operator::from_rows(&[
            vec![c(0.0, 0.0), c(0.0, -2.0)],
            vec![c(0.0, -2.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let q = sylvester_solve(&h0, &r, &tol()).unwrap();
        let expected = Operator::from_rows(&[
            vec![c(0.0, 0.0), c(0.0, 2.0)],
            vec![c(0.0, -2.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert!(q.max_diff(&expected) < 1e-14);
    }

    #[test]
    fn zero_source_gives_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let h0 = random::hermitian(5, &mut rng);
        let q = sylvester_solve(&h0, &Operator::zeros(5), &tol()).unwrap();
        assert_eq!(q.max_norm(), 0.0);
    }

    #[test]
    fn degenerate_obstruction() {
        let h0 = Operator::identity(2);
        let r = Operator::from_rows(&[
            vec![c(0.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(
            sylvester_solve(&h0, &r, &tol()),
            Err(Error::Obstruction { .. })
        ));
    }

    #[test]
    fn degenerate_block_with_solvable_source() {
        let h0 = Operator::real_diagonal(&[1.0, 1.0, 3.0]).unwrap();
        let mut m = DMatrix::<Complex64>::zeros(3, 3);
        m[(0, 2)] = c(0.5, 1.0);
        m[(2, 0)] = c(-0.5, 1.0);
        m[(1, 2)] = c(0.0, 2.0);
        m[(2, 1)] = c(0.0, 2.0);
        let r = Operator::new(m).unwrap();
        let sol = CommutatorSolver::new(&h0, &tol())
            .unwrap()
            .solve(&r)
            .unwrap();
        assert_eq!(sol.degenerate_entries, 5);
        assert!(h0.commutator(&sol.q).max_diff(&r) < 1e-14);
    }

    #[test]
    fn rejects_hermitian_source() {
        let h0 = Operator::real_diagonal(&[1.0, 2.0]).unwrap();
        let r = Operator::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(matches!(
            sylvester_solve(&h0, &r, &tol()),
            Err(Error::Structure { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn solves_random_commutator_equations(seed in any::<u64>(), n in 2usize..9) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h0 = random::hermitian(n, &mut rng);
            let q_true = random::hermitian(n, &mut rng);
            let r = h0.commutator(&q_true);
            let q = sylvester_solve(&h0, &r, &tol()).unwrap();
            prop_assert!(q.hermiticity_defect() <= 1e-12);
            prop_assert!(h0.commutator(&q).max_diff(&r) <= 1e-10);
            // minimal norm: never larger than any other solution
            prop_assert!(q.matrix().norm() <= q_true.matrix().norm() + 1e-10);
        }
    }
}
