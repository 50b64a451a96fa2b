//! `phq orders <ell>`: order-by-order check on a built-in random instance.

use phq_core::random::pt_symmetric_split;
use phq_core::{
    master_order_equation_rhs, nested_commutator, order_equation_rhs, order_residual,
    solve_q_series, Operator, SplitHamiltonian, Tolerance,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::emit::format_float;
use crate::report::Verdict;

pub const ORDERS_DIM: usize = 4;

#[derive(Debug, Clone)]
pub struct OrderRow {
    pub order: usize,
    pub source_norm: f64,
    pub verdicts: Vec<Verdict>,
}

/// `R_m` against its closed form where one is known: `−2H₁`, `0` and
/// `(1/12)[H₀,Q₁]₃` for `m = 1, 2, 3`.
fn closed_form(split: &SplitHamiltonian, q1: &Operator, m: usize) -> Option<Operator> {
    match m {
        1 => Some(split.h1().scale(-2.0)),
        2 => Some(Operator::zeros(split.dim())),
        3 => nested_commutator(split.h0(), q1, 3)
            .ok()
            .map(|c| c.scale(1.0 / 12.0)),
        _ => None,
    }
}

pub fn check_orders(ell: usize, seed: u64, tol: &Tolerance) -> phq_core::Result<Vec<OrderRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (h0, h1) = pt_symmetric_split(ORDERS_DIM, &mut rng);
    let split = SplitHamiltonian::new(h0, h1, 0.1, tol)?;
    let q = solve_q_series(&split, ell, &[], tol)?;
    let q_scale = q.terms().iter().map(Operator::max_norm).fold(0.0, f64::max);
    let scale = split.h0().max_norm() * q_scale.max(1.0) + split.h1().max_norm();
    let threshold = tol.threshold(scale);

    let mut rows = Vec::with_capacity(ell);
    for m in 1..=ell {
        // the printed closed forms assume the minimal gauge Q₂ = 0
        let lower = &q.terms()[..m - 1];
        let r = order_equation_rhs(&split, lower, m, tol)?;
        let mut verdicts = Vec::new();
        if let Some(expected) = closed_form(&split, q.term(1), m) {
            verdicts.push(Verdict::at_most(
                "closed_form",
                r.max_diff(&expected),
                threshold,
            ));
        }
        let master = master_order_equation_rhs(&split, lower, m)?;
        verdicts.push(Verdict::at_most(
            "master_agreement",
            r.max_diff(&master),
            threshold,
        ));
        let residual = order_residual(&split, &q, m)?.max_norm();
        verdicts.push(Verdict::at_most("solved_residual", residual, threshold));
        rows.push(OrderRow {
            order: m,
            source_norm: r.max_norm(),
            verdicts,
        });
    }
    Ok(rows)
}

pub fn render(rows: &[OrderRow]) -> String {
    let mut out = String::new();
    for row in rows {
        out.push_str(&format!(
            "order {} |R|={}",
            row.order,
            format_float(row.source_norm)
        ));
        for v in &row.verdicts {
            let value = v.value.map(format_float).unwrap_or_else(|| "nan".into());
            let status = if v.pass { "ok" } else { "FAIL" };
            out.push_str(&format!(" {}={} {}", v.name, value, status));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_orders_pass() {
        let rows = check_orders(5, 0, &Tolerance::default()).unwrap();
        assert_eq!(rows.len(), 5);
        assert!(
            rows.iter().flat_map(|r| &r.verdicts).all(|v| v.pass),
            "{}",
            render(&rows)
        );
        assert_eq!(rows[0].verdicts.len(), 3);
        assert_eq!(rows[3].verdicts.len(), 2);
    }
}
