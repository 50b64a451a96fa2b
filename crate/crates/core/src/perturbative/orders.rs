//! Order-by-order expansion of `e^(−Q) H e^(Q) − H†` with
//! `H = H₀ + εH₁`, `H† = H₀ − εH₁` and `Q = Σ Qⱼ εʲ`.
//!
//! Substituting the series into `Σ_k [H,Q]_k / k!` and collecting `εᵐ`
//! gives one nested commutator `[..[X, Q_{j₁}], .., Q_{j_k}] / k!` for every
//! composition `j₁ + … + j_k` of `m` (head `X = H₀`) or of `m − 1` (head
//! `X = H₁`). Only `k ≤ m` slots contribute, so the coefficient is exact.

use super::{QSeries, SplitHamiltonian};
use crate::error::{Error, Result};
use crate::operator::Operator;
use crate::tolerance::Tolerance;

fn is_zero(op: &Operator) -> bool {
    op.matrix().iter().all(|z| z.re == 0.0 && z.im == 0.0)
}

/// Adds `Σ over compositions of remaining` of `[current, Q_{j₁}, …] / k!`.
fn walk(
    current: &Operator,
    remaining: usize,
    depth: usize,
    weight: f64,
    terms: &[Operator],
    live: &[bool],
    acc: &mut Operator,
) {
    let next_weight = weight / (depth + 1) as f64;
    for j in 1..=remaining {
        if !live[j - 1] {
            continue;
        }
        let next = current.commutator(&terms[j - 1]);
        if j == remaining {
            *acc += &next.scale(next_weight);
        } else {
            walk(
                &next,
                remaining - j,
                depth + 1,
                next_weight,
                terms,
                live,
                acc,
            );
        }
    }
}

pub(crate) fn residual_from_terms(
    split: &SplitHamiltonian,
    terms: &[Operator],
    m: usize,
) -> Operator {
    let live: Vec<bool> = terms.iter().map(|t| !is_zero(t)).collect();
    let mut acc = Operator::zeros(split.dim());
    if m == 1 {
        // εH₁ from H and −(−εH₁) from −H†
        acc += &split.h1().scale(2.0);
    }
    walk(split.h0(), m, 0, 1.0, terms, &live, &mut acc);
    if m >= 2 {
        walk(split.h1(), m - 1, 0, 1.0, terms, &live, &mut acc);
    }
    acc
}

/// Coefficient of `εᵐ` in `e^(−Q) H e^(Q) − H†`; zero exactly when the
/// order-`m` equation holds.
pub fn order_residual(split: &SplitHamiltonian, q: &QSeries, m: usize) -> Result<Operator> {
    if m == 0 || m > q.order() {
        return Err(Error::Domain(format!(
            "order {m} outside the available range 1..={}",
            q.order()
        )));
    }
    split.h0().ensure_same_dim(q.term(1))?;
    Ok(residual_from_terms(split, &q.terms()[..m], m))
}

/// `R_m` in `[H₀, Q_m] = R_m`, from `Q₁ … Q_{m−1}` (the first `m − 1`
/// entries of `lower`). `R_m` must be anti-Hermitian for a Hermitian
/// solution to exist; that holds once every lower order is solved.
pub fn order_equation_rhs(
    split: &SplitHamiltonian,
    lower: &[Operator],
    m: usize,
    tol: &Tolerance,
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
    let mut terms: Vec<Operator> = lower[..m - 1].to_vec();
    terms.push(Operator::zeros(split.dim()));
    let r = -&residual_from_terms(split, &terms, m);
    let scale = r
        .max_norm()
        .max(split.h0().max_norm())
        .max(split.h1().max_norm());
    let defect = r.anti_hermiticity_defect();
    if !tol.accepts(defect, scale) {
        return Err(Error::Consistency(format!(
            "R_{m} is not anti-Hermitian (defect {defect:e}); lower orders are not solved"
        )));
    }
    Ok(r)
}
