//! The exponential metric `η₊ = e^(−Q)` for `H = H₀ + εH₁` with Hermitian
//! `H₀` and anti-Hermitian `H₁`, solved order by order in `ε`.
//!
//! Two independent routes produce the order-`m` equation `[H₀, Q_m] = R_m`:
//! [`order_equation_rhs`] expands `e^(−Q) H e^(Q) − H†` over compositions of
//! `m`, while [`master_order_equation_rhs`] collects powers of `ε` in the
//! closed triple-sum master formula. The solver uses the first; the second
//! is kept as a cross-check.

mod master;
mod orders;
mod series;
mod solve;
mod sylvester;

use std::fmt;

use crate::error::{Error, Result};
use crate::operator::Operator;
use crate::tolerance::Tolerance;

pub use master::{
    master_formula_coefficients, master_formula_rhs, master_order_equation_rhs,
    master_order_residual, master_term,
};
pub use orders::{order_equation_rhs, order_residual};
pub use series::{CommutatorAlgebra, OperatorSeries};
pub use solve::{metric_from_series, scaling_exponent, solve_q_series, ScalingFit, NOISE_FLOOR};
pub use sylvester::{sylvester_solve, CommutatorSolver, SylvesterSolution};

/// `H = H₀ + εH₁` with `H₀` Hermitian and `H₁` anti-Hermitian.
#[derive(Debug, Clone)]
pub struct SplitHamiltonian {
    h0: Operator,
    h1: Operator,
    epsilon: f64,
}

impl SplitHamiltonian {
    pub fn new(h0: Operator, h1: Operator, epsilon: f64, tol: &Tolerance) -> Result<Self> {
        h0.ensure_same_dim(&h1)?;
        h0.require_hermitian("H0", tol)?;
        h1.require_anti_hermitian("H1", tol)?;
        if !epsilon.is_finite() {
            return Err(Error::Domain(format!(
                "coupling must be finite, got {epsilon}"
            )));
        }
        Ok(Self { h0, h1, epsilon })
    }

    pub fn h0(&self) -> &Operator {
        &self.h0
    }

    pub fn h1(&self) -> &Operator {
        &self.h1
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn dim(&self) -> usize {
        self.h0.dim()
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        Self {
            epsilon,
            ..self.clone()
        }
    }

    pub fn hamiltonian(&self) -> Operator {
        &self.h0 + &self.h1.scale(self.epsilon)
    }
}

/// How the free part of `Q_m` was fixed at one order.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeRecord {
    pub order: usize,
    /// Number of eigenbasis entries set to zero because `H₀` is degenerate
    /// there (ordered pairs, diagonal included).
    pub degenerate_entries: usize,
    /// Max-norm of the user-supplied `H₀`-commuting addition, if any.
    pub gauge_norm: Option<f64>,
}

impl fmt::Display for GaugeRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "order {}: minimal-norm ({} degenerate entries zeroed)",
            self.order, self.degenerate_entries
        )?;
        if let Some(norm) = self.gauge_norm {
            write!(f, " + commuting gauge term (max-norm {norm:e})")?;
        }
        Ok(())
    }
}

/// Truncated expansion `Q = Σ_{j=1..ℓ} Qⱼ εʲ` with Hermitian `Qⱼ`.
#[derive(Debug, Clone)]
pub struct QSeries {
    terms: Vec<Operator>,
    gauge_log: Vec<GaugeRecord>,
}

impl QSeries {
    pub fn new(terms: Vec<Operator>, tol: &Tolerance) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Domain("a Q series needs at least one term".into()));
        }
        for t in &terms {
            terms[0].ensure_same_dim(t)?;
            t.require_hermitian("Q term", tol)?;
        }
        Ok(Self {
            terms,
            gauge_log: Vec::new(),
        })
    }

    pub fn order(&self) -> usize {
        self.terms.len()
    }

    pub fn dim(&self) -> usize {
        self.terms[0].dim()
    }

    pub fn terms(&self) -> &[Operator] {
        &self.terms
    }

    /// `Qⱼ` for `j` in `1..=order`.
    pub fn term(&self, j: usize) -> &Operator {
        &self.terms[j - 1]
    }

    pub fn gauge_log(&self) -> &[GaugeRecord] {
        &self.gauge_log
    }

    /// The first `order` terms.
    pub fn truncated(&self, order: usize) -> Self {
        Self {
            terms: self.terms[..order.min(self.order())].to_vec(),
            gauge_log: self
                .gauge_log
                .iter()
                .filter(|r| r.order <= order)
                .cloned()
                .collect(),
        }
    }

    /// `Σⱼ Qⱼ εʲ`.
    pub fn sum(&self, epsilon: f64) -> Operator {
        let mut out = Operator::zeros(self.dim());
        let mut power = 1.0;
        for t in &self.terms {
            power *= epsilon;
            out += &t.scale(power);
        }
        out
    }
}
