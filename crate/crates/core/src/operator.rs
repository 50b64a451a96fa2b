//! Dense complex operators and the commutator algebra built on them.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::functions::HermitianEigen;
use crate::tolerance::Tolerance;

/// A square complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct Operator {
    mat: DMatrix<Complex64>,
    label: Option<String>,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.label {
            Some(label) => write!(f, "Operator[{label}] {}", self.mat),
            None => write!(f, "Operator {}", self.mat),
        }
    }
}

impl Operator {
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        let (rows, cols) = mat.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::Empty);
        }
        for col in 0..cols {
            for row in 0..rows {
                let z = mat[(row, col)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row, col });
                }
            }
        }
        Ok(Self { mat, label: None })
    }

    /// Wrap a matrix already known to be square and finite.
    pub(crate) fn from_matrix_unchecked(mat: DMatrix<Complex64>) -> Self {
        debug_assert!(mat.is_square());
        Self { mat, label: None }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                cols: bad.len(),
            });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_matrix_unchecked(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_matrix_unchecked(DMatrix::zeros(dim, dim))
    }

    pub fn diagonal(entries: &[Complex64]) -> Result<Self> {
        let n = entries.len();
        Self::new(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                entries[i]
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    pub fn real_diagonal(entries: &[f64]) -> Result<Self> {
        let entries: Vec<Complex64> = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::diagonal(&entries)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.mat
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.mat[(row, col)]
    }

    pub fn ensure_same_dim(&self, other: &Operator) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::Shape {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Operator {
        Self::from_matrix_unchecked(self.mat.adjoint())
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Operator) -> Operator {
        Self::from_matrix_unchecked(&self.mat * &other.mat - &other.mat * &self.mat)
    }

    pub fn scale(&self, factor: f64) -> Operator {
        Self::from_matrix_unchecked(&self.mat * Complex64::new(factor, 0.0))
    }

    pub fn scale_complex(&self, factor: Complex64) -> Operator {
        Self::from_matrix_unchecked(&self.mat * factor)
    }

    /// Largest absolute entry.
    pub fn max_norm(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Operator 2-norm (largest singular value).
    pub fn norm2(&self) -> f64 {
        self.singular_values().first().copied().unwrap_or(0.0)
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self.mat.clone().singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    pub fn min_singular_value(&self) -> f64 {
        self.singular_values().last().copied().unwrap_or(0.0)
    }

    /// `‖M − M†‖_max`.
    pub fn hermiticity_defect(&self) -> f64 {
        max_abs_diff(&self.mat, &self.mat.adjoint())
    }

    /// `‖M + M†‖_max`.
    pub fn anti_hermiticity_defect(&self) -> f64 {
        (&self.mat + self.mat.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// `(M + M†) / 2`.
    pub fn hermitian_part(&self) -> Operator {
        Self::from_matrix_unchecked((&self.mat + self.mat.adjoint()) * Complex64::new(0.5, 0.0))
    }

    /// `(M − M†) / 2`.
    pub fn anti_hermitian_part(&self) -> Operator {
        Self::from_matrix_unchecked((&self.mat - self.mat.adjoint()) * Complex64::new(0.5, 0.0))
    }

    pub fn is_hermitian(&self, tol: &Tolerance) -> bool {
        tol.accepts(self.hermiticity_defect(), self.max_norm())
    }

    pub fn is_anti_hermitian(&self, tol: &Tolerance) -> bool {
        tol.accepts(self.anti_hermiticity_defect(), self.max_norm())
    }

    pub fn require_hermitian(&self, what: &'static str, tol: &Tolerance) -> Result<()> {
        if self.is_hermitian(tol) {
            Ok(())
        } else {
            Err(Error::Structure {
                what,
                expected: "Hermitian",
                defect: self.hermiticity_defect(),
            })
        }
    }

    pub fn require_anti_hermitian(&self, what: &'static str, tol: &Tolerance) -> Result<()> {
        if self.is_anti_hermitian(tol) {
            Ok(())
        } else {
            Err(Error::Structure {
                what,
                expected: "anti-Hermitian",
                defect: self.anti_hermiticity_defect(),
            })
        }
    }

    /// `‖self − other‖_max`.
    pub fn max_diff(&self, other: &Operator) -> f64 {
        max_abs_diff(&self.mat, &other.mat)
    }

    pub fn try_inverse(&self) -> Result<Operator> {
        self.mat
            .clone()
            .try_inverse()
            .map(Self::from_matrix_unchecked)
            .ok_or(Error::Singular {
                singular_value: self.min_singular_value(),
            })
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }
}

fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

impl<'a> Add<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn add(self, rhs: &'a Operator) -> Operator {
        Operator::from_matrix_unchecked(&self.mat + &rhs.mat)
    }
}

impl<'a> Sub<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn sub(self, rhs: &'a Operator) -> Operator {
        Operator::from_matrix_unchecked(&self.mat - &rhs.mat)
    }
}

impl<'a> Mul<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn mul(self, rhs: &'a Operator) -> Operator {
        Operator::from_matrix_unchecked(&self.mat * &rhs.mat)
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator::from_matrix_unchecked(-&self.mat)
    }
}

impl AddAssign<&Operator> for Operator {
    fn add_assign(&mut self, rhs: &Operator) {
        self.mat += &rhs.mat;
    }
}

/// `[H, Q]_k`: `[H,Q]_1 = HQ − QH`, `[H,Q]_{k+1} = [[H,Q]_k, Q]`.
pub fn nested_commutator(h: &Operator, q: &Operator, k: usize) -> Result<Operator> {
    h.ensure_same_dim(q)?;
    if k == 0 {
        return Err(Error::Domain(
            "nested commutator depth must be at least 1".into(),
        ));
    }
    let mut acc = h.commutator(q);
    for _ in 1..k {
        acc = acc.commutator(q);
    }
    Ok(acc)
}

/// Truncated conjugation `H + Σ_{k=1..k_max} [H,Q]_k / k!`, the series form
/// of `e^(−Q) H e^(Q)`.
pub fn bch_conjugate(h: &Operator, q: &Operator, k_max: usize) -> Result<Operator> {
    h.ensure_same_dim(q)?;
    if k_max == 0 {
        return Err(Error::Domain("truncation order must be at least 1".into()));
    }
    let mut sum = h.clone();
    // term_k = [H,Q]_k / k!, built by dividing by k at each step
    let mut term = h.clone();
    for k in 1..=k_max {
        term = term.commutator(q).scale(1.0 / k as f64);
        sum += &term;
    }
    Ok(sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub hermitian: bool,
    pub anti_hermitian: bool,
    pub positive_definite: bool,
    pub invertible: bool,
}

pub fn classify(m: &Operator, tol: &Tolerance) -> Classification {
    let hermitian = m.is_hermitian(tol);
    let anti_hermitian = m.is_anti_hermitian(tol);
    let positive_definite = hermitian
        && HermitianEigen::of_hermitian_part(m)
            .values
            .first()
            .is_some_and(|&lo| lo > tol.abs_tol);
    let sv = m.singular_values();
    let invertible = match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) => lo > tol.threshold(hi),
        _ => false,
    };
    Classification {
        hermitian,
        anti_hermitian,
        positive_definite,
        invertible,
    }
}
