use super::orders::{order_equation_rhs, residual_from_terms};
use super::sylvester::CommutatorSolver;
use super::{GaugeRecord, QSeries, SplitHamiltonian};
use crate::error::{Error, Result};
use crate::functions::herm_exp;
use crate::operator::Operator;
use crate::spectral::{pseudo_hermiticity_residual, MetricOperator, Provenance};
use crate::tolerance::Tolerance;

/// Residuals below this are treated as rounding noise when fitting slopes.
pub const NOISE_FLOOR: f64 = 1e-13;

/// Solves `[H₀, Q_m] = R_m` for `m = 1..=ell`.
///
/// `gauge[m−1]`, when present, is added to the minimal-norm `Q_m`; it must be
/// Hermitian and commute with `H₀`. Later orders see the gauged term.
pub fn solve_q_series(
    split: &SplitHamiltonian,
    ell: usize,
    gauge: &[Option<Operator>],
    tol: &Tolerance,
) -> Result<QSeries> {
    if ell == 0 {
        return Err(Error::Domain("ell must be at least 1".into()));
    }
    if gauge.len() > ell {
        return Err(Error::Domain(format!(
            "{} gauge terms given for {ell} orders",
            gauge.len()
        )));
    }
    let solver = CommutatorSolver::new(split.h0(), tol)?;
    let mut terms: Vec<Operator> = Vec::with_capacity(ell);
    let mut gauge_log = Vec::with_capacity(ell);
    for m in 1..=ell {
        // anti-Hermiticity already checked against the series scale
        let r = order_equation_rhs(split, &terms, m, tol)?.anti_hermitian_part();
        let sol = solver.solve(&r)?;
        let mut q = sol.q;
        let mut gauge_norm = None;
        if let Some(Some(g)) = gauge.get(m - 1) {
            validate_gauge(split.h0(), g, m, tol)?;
            q += &g.hermitian_part();
            gauge_norm = Some(g.max_norm());
        }
        terms.push(q);
        gauge_log.push(GaugeRecord {
            order: m,
            degenerate_entries: sol.degenerate_entries,
            gauge_norm,
        });
    }

    let q_scale = terms.iter().map(Operator::max_norm).fold(0.0, f64::max);
    let scale = split.h0().max_norm() * q_scale.max(1.0) + split.h1().max_norm();
    for m in 1..=ell {
        let defect = residual_from_terms(split, &terms[..m], m).max_norm();
        if !tol.accepts(defect, scale) {
            return Err(Error::Consistency(format!(
                "order {m} residual {defect:e} after solving"
            )));
        }
    }
    Ok(QSeries { terms, gauge_log })
}

fn validate_gauge(h0: &Operator, g: &Operator, order: usize, tol: &Tolerance) -> Result<()> {
    h0.ensure_same_dim(g)?;
    if !g.is_hermitian(tol) {
        return Err(Error::Gauge {
            order,
            reason: format!("not Hermitian (defect {:e})", g.hermiticity_defect()),
        });
    }
    let comm = h0.commutator(g).max_norm();
    if !tol.accepts(comm, h0.max_norm() * g.max_norm()) {
        return Err(Error::Gauge {
            order,
            reason: format!("does not commute with H0 (‖[H0,G]‖ = {comm:e})"),
        });
    }
    Ok(())
}

/// `η₊ = e^(−Σ Qⱼεʲ)`.
pub fn metric_from_series(q: &QSeries, epsilon: f64, tol: &Tolerance) -> Result<MetricOperator> {
    let eta = herm_exp(&q.sum(epsilon), tol)?;
    Ok(MetricOperator::from_parts(
        eta,
        Provenance::Perturbative {
            order: q.order(),
            epsilon,
        },
    ))
}

/// Least-squares fit of `log(residual)` against `log(ε)`.
#[derive(Debug, Clone)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    /// `(ε, ‖H†η − ηH‖_max)` per sampled coupling.
    pub points: Vec<(f64, f64)>,
    /// Some residual fell below [`NOISE_FLOOR`]; the slope is unreliable.
    pub indeterminate: bool,
}

pub fn scaling_exponent(
    split: &SplitHamiltonian,
    q: &QSeries,
    eps_list: &[f64],
    tol: &Tolerance,
) -> Result<ScalingFit> {
    if eps_list.len() < 3 {
        return Err(Error::Domain(
            "scaling needs at least three couplings".into(),
        ));
    }
    if eps_list.iter().any(|e| !(*e > 0.0 && e.is_finite()))
        || eps_list.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(Error::Domain(
            "couplings must be positive and strictly decreasing".into(),
        ));
    }
    let mut points = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let h = split.with_epsilon(eps).hamiltonian();
        let eta = metric_from_series(q, eps, tol)?;
        points.push((eps, pseudo_hermiticity_residual(&h, &eta)?));
    }
    let indeterminate = points.iter().any(|&(_, r)| r.is_nan() || r < NOISE_FLOOR);
    let (slope, intercept) = fit_line(
        &points
            .iter()
            .map(|&(e, r)| (e.ln(), r.max(f64::MIN_POSITIVE).ln()))
            .collect::<Vec<_>>(),
    );
    Ok(ScalingFit {
        slope,
        intercept,
        points,
        indeterminate,
    })
}

fn fit_line(xy: &[(f64, f64)]) -> (f64, f64) {
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
