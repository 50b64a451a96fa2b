//! The closed-form master relation
//!
//! ```text
//! εH₁ = Σ_{m=1..ℓ} Σ_{k=m..ℓ} Σ_{j=1..m} (−1)ʲ jᵏ / (k! 2ᵐ) · C(m,j) · [H₀,Q]_k + O(ε^{ℓ+1})
//! ```
//!
//! evaluated term by term in the printed summation order.

use super::series::{CommutatorAlgebra, OperatorSeries};
use super::{QSeries, SplitHamiltonian};
use crate::error::{Error, Result};
use crate::operator::Operator;

/// Coefficient of the `(m, k, j)` term. The ratio `jᵏ/k!` is accumulated
/// as a product of `j/i` so no factorial is ever formed.
pub fn master_term(m: usize, k: usize, j: usize) -> f64 {
    let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
    let power_over_factorial: f64 = (1..=k).map(|i| j as f64 / i as f64).product();
    let binomial: f64 = (1..=j).map(|i| (m + 1 - i) as f64 / i as f64).product();
    let two_m = 2f64.powi(m as i32);
    sign * power_over_factorial * binomial / two_m
}

/// Total coefficient `c_k` multiplying `[H₀,Q]_k`, for `k = 1..=ell`.
pub fn master_formula_coefficients(ell: usize) -> Vec<f64> {
    let mut c = vec![0.0; ell];
    for m in 1..=ell {
        for k in m..=ell {
            for j in 1..=m {
                c[k - 1] += master_term(m, k, j);
            }
        }
    }
    c
}

fn master_sum<A: CommutatorAlgebra>(h0: &A, q: &A, ell: usize) -> A {
    let mut nested = Vec::with_capacity(ell);
    let mut current = h0.commutator(q);
    for _ in 0..ell {
        let next = current.commutator(q);
        nested.push(std::mem::replace(&mut current, next));
    }
    let mut acc = h0.zero_like();
    for m in 1..=ell {
        for k in m..=ell {
            for j in 1..=m {
                acc.add_scaled(&nested[k - 1], master_term(m, k, j));
            }
        }
    }
    acc
}

/// Right-hand side of the master relation for a fixed operator `Q`.
pub fn master_formula_rhs(h0: &Operator, q: &Operator, ell: usize) -> Result<Operator> {
    h0.ensure_same_dim(q)?;
    if ell == 0 {
        return Err(Error::Domain("ell must be at least 1".into()));
    }
    Ok(master_sum(h0, q, ell))
}

/// `(master sum with Q = Σ Qⱼεʲ) − εH₁`, expanded through `ε^order`.
fn master_series(split: &SplitHamiltonian, terms: &[Operator], order: usize) -> OperatorSeries {
    let dim = split.dim();
    let h0 = OperatorSeries::constant(split.h0(), order);
    let q = OperatorSeries::from_terms(terms, dim, order);
    let mut out = master_sum(&h0, &q, order);
    let mut h1 = OperatorSeries::from_terms(&[split.h1().clone()], dim, order);
    h1 = {
        let mut neg = h1.zero_like();
        neg.add_scaled(&h1, -1.0);
        neg
    };
    out.add_scaled(&h1, 1.0);
    out
}

/// Coefficient of `εᵐ` in the master relation moved to one side. Given
/// solved lower orders it equals `−½` times [`order_residual`].
///
/// [`order_residual`]: super::order_residual
pub fn master_order_residual(split: &SplitHamiltonian, q: &QSeries, m: usize) -> Result<Operator> {
    if m == 0 || m > q.order() {
        return Err(Error::Domain(format!(
            "order {m} outside the available range 1..={}",
            q.order()
        )));
    }
    split.h0().ensure_same_dim(q.term(1))?;
    Ok(master_series(split, &q.terms()[..m], m).coeff(m).clone())
}

/// `R_m` read off the master relation: the only `Q_m` contribution at
/// order `m` is `−½[H₀,Q_m]`, so `R_m = 2 × (order-m coefficient with Q_m = 0)`.
pub fn master_order_equation_rhs(
    split: &SplitHamiltonian,
    lower: &[Operator],
    m: usize,
) -> Result<Operator> {
    if m == 0 || lower.len() + 1 < m {
        return Err(Error::Domain(format!(
            "order {m} needs Q_1..Q_{} but {} terms were given",
            m.saturating_sub(1),
            lower.len()
        )));
    }
    for t in lower {
        split.h0().ensure_same_dim(t)?;
    }
    let terms = &lower[..m - 1];
    Ok(master_series(split, terms, m).coeff(m).scale(2.0))
}
