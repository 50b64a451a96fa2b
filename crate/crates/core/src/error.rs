use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    Shape { left: usize, right: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is empty")]
    Empty,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid tolerance: {0}")]
    Tolerance(String),

    #[error("{what} is not {expected} (defect {defect:e})")]
    Structure {
        what: &'static str,
        expected: &'static str,
        defect: f64,
    },

    #[error("operator is not positive-definite: eigenvalue {eigenvalue:e}")]
    Positivity { eigenvalue: f64 },

    #[error("operator is singular: smallest singular value {singular_value:e}")]
    Singular { singular_value: f64 },

    #[error(
        "matrix is not diagonalizable: eigenvector condition number {condition:e} exceeds {cap:e}"
    )]
    NotDiagonalizable { condition: f64, cap: f64 },

    #[error("eigenvalue E[{index}] = {value} is not real")]
    ComplexEigenvalue { index: usize, value: Complex64 },

    #[error("pseudo-Hermiticity residual {residual:e} exceeds {threshold:e}")]
    ResidualTooLarge { residual: f64, threshold: f64 },

    #[error("commutator equation has no solution: degenerate pair ({row}, {col}) with gap {gap:e} carries source element {element:e}")]
    Obstruction {
        row: usize,
        col: usize,
        gap: f64,
        element: f64,
    },

    #[error("invalid gauge term at order {order}: {reason}")]
    Gauge { order: usize, reason: String },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("{0}")]
    Domain(String),

    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
}
