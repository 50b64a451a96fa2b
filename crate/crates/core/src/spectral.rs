//! Metric operators built from the biorthonormal eigensystem of a
//! diagonalizable Hamiltonian, and the diagnostics that go with them:
//! pseudo-Hermiticity residuals, the equivalent Hermitian Hamiltonian,
//! the C-operator, `O†O` factorizations and intertwiners between metrics.

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;

use crate::eigen::general_eigen;
use crate::error::{Error, Result};
use crate::functions::{herm_sqrt_inv, HermitianEigen};
use crate::operator::Operator;
use crate::tolerance::Tolerance;

/// Default cap on the condition number of the (unit-column) right
/// eigenvector matrix before a Hamiltonian is treated as defective.
pub const DEFAULT_CONDITION_CAP: f64 = 1e8;

/// Right eigenvectors `ψₙ` of `H` and left eigenvectors `φₙ` (eigenvectors
/// of `H†`) normalized so that `⟨φₘ|ψₙ⟩ = δₘₙ`.
///
/// Eigenvalues are sorted by real part, then imaginary part, then original
/// index. Each `ψₙ` has unit norm and its first non-negligible component is
/// real and positive; `φₙ` is then fixed by biorthonormality.
#[derive(Debug, Clone)]
pub struct BiorthonormalSystem {
    eigenvalues: Vec<Complex64>,
    right: DMatrix<Complex64>,
    left: DMatrix<Complex64>,
}

/// Max-norm defects of the biorthonormal-system invariants.
#[derive(Debug, Clone, Copy)]
pub struct SystemDefects {
    /// `‖Φ†Ψ − I‖`
    pub gram: f64,
    /// `maxₙ ‖Hψₙ − Eₙψₙ‖`
    pub right: f64,
    /// `maxₙ ‖H†φₙ − Eₙ*φₙ‖`
    pub left: f64,
    /// `‖Σ|ψₙ⟩⟨φₙ| − I‖`
    pub completeness: f64,
}

impl BiorthonormalSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    /// Columns are `ψₙ`.
    pub fn right_vectors(&self) -> &DMatrix<Complex64> {
        &self.right
    }

    /// Columns are `φₙ`.
    pub fn left_vectors(&self) -> &DMatrix<Complex64> {
        &self.left
    }

    pub fn psi(&self, n: usize) -> DVector<Complex64> {
        self.right.column(n).into_owned()
    }

    pub fn phi(&self, n: usize) -> DVector<Complex64> {
        self.left.column(n).into_owned()
    }

    pub fn defects(&self, h: &Operator) -> SystemDefects {
        let n = self.dim();
        let id = DMatrix::<Complex64>::identity(n, n);
        let gram = max_abs(&(self.left.adjoint() * &self.right - &id));
        let completeness = max_abs(&(&self.right * self.left.adjoint() - &id));
        let hm = h.matrix();
        let hd = hm.adjoint();
        let mut right = 0.0f64;
        let mut left = 0.0f64;
        for (k, e) in self.eigenvalues.iter().enumerate() {
            let psi = self.right.column(k);
            let phi = self.left.column(k);
            right = right.max(max_abs_vec(&(hm * psi - psi * *e)));
            left = left.max(max_abs_vec(&(&hd * phi - phi * e.conj())));
        }
        SystemDefects {
            gram,
            right,
            left,
            completeness,
        }
    }

    /// Fails with the worst offending eigenvalue when the spectrum is not
    /// real within `tol`.
    pub fn require_real_spectrum(&self, tol: &Tolerance) -> Result<()> {
        let scale = self
            .eigenvalues
            .iter()
            .map(|e| e.norm())
            .fold(0.0, f64::max);
        let worst = self
            .eigenvalues
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.im.abs().total_cmp(&b.1.im.abs()));
        match worst {
            Some((index, value)) if !tol.accepts(value.im.abs(), scale) => {
                Err(Error::ComplexEigenvalue {
                    index,
                    value: *value,
                })
            }
            _ => Ok(()),
        }
    }

    /// `Σₙ wₙ |φₙ⟩⟨φₙ|`.
    fn weighted_left_sum(&self, weights: &[f64]) -> Operator {
        let mut scaled = self.left.clone();
        for (k, w) in weights.iter().enumerate() {
            let mut col = scaled.column_mut(k);
            col *= Complex64::new(*w, 0.0);
        }
        Operator::from_matrix_unchecked(scaled * self.left.adjoint()).hermitian_part()
    }
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn max_abs_vec(v: &DVector<Complex64>) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn biorthonormal_eigensystem(h: &Operator) -> Result<BiorthonormalSystem> {
    biorthonormal_eigensystem_with_cap(h, DEFAULT_CONDITION_CAP)
}

pub fn biorthonormal_eigensystem_with_cap(
    h: &Operator,
    condition_cap: f64,
) -> Result<BiorthonormalSystem> {
    let n = h.dim();
    let eig = general_eigen(h.matrix())?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (eig.values[a], eig.values[b]);
        x.re.total_cmp(&y.re)
            .then(x.im.total_cmp(&y.im))
            .then(a.cmp(&b))
    });

    let eigenvalues: Vec<Complex64> = order.iter().map(|&i| eig.values[i]).collect();
    let mut right = DMatrix::<Complex64>::zeros(n, n);
    for (k, &src) in order.iter().enumerate() {
        let mut psi = eig.vectors.column(src).into_owned();
        if let Some(first) = psi.iter().copied().find(|z| z.norm() > 1e-12) {
            psi *= first.conj() / first.norm();
        }
        right.set_column(k, &psi);
    }

    let sv = right.clone().singular_values();
    let hi = sv.iter().copied().fold(0.0, f64::max);
    let lo = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let condition = hi / lo;
    if !condition.is_finite() || condition > condition_cap {
        return Err(Error::NotDiagonalizable {
            condition,
            cap: condition_cap,
        });
    }

    // Φ† = Ψ⁻¹ biorthonormalizes every eigenspace at once, including
    // degenerate blocks where the left family is only fixed up to mixing.
    let right_inv = right
        .clone()
        .try_inverse()
        .ok_or(Error::NotDiagonalizable {
            condition,
            cap: condition_cap,
        })?;
    let left = right_inv.adjoint();

    Ok(BiorthonormalSystem {
        eigenvalues,
        right,
        left,
    })
}

pub fn spectrum_is_real(h: &Operator, tol: &Tolerance) -> Result<bool> {
    let sys = biorthonormal_eigensystem(h)?;
    Ok(sys.require_real_spectrum(tol).is_ok())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provenance {
    Spectral,
    Perturbative { order: usize, epsilon: f64 },
    User,
}

/// A Hermitian positive-definite metric together with where it came from.
#[derive(Debug, Clone)]
pub struct MetricOperator {
    op: Operator,
    provenance: Provenance,
}

impl MetricOperator {
    /// Validates Hermiticity and positive-definiteness of a supplied metric.
    pub fn user(op: Operator, tol: &Tolerance) -> Result<Self> {
        let eig = HermitianEigen::new(&op, tol)?;
        if eig.min().is_nan() || eig.min() <= tol.abs_tol {
            return Err(Error::Positivity {
                eigenvalue: eig.min(),
            });
        }
        Ok(Self {
            op,
            provenance: Provenance::User,
        })
    }

    pub(crate) fn from_parts(op: Operator, provenance: Provenance) -> Self {
        Self { op, provenance }
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn into_op(self) -> Operator {
        self.op
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }
}

/// `η₊ = Σₙ |φₙ⟩⟨φₙ|`; requires a real spectrum.
pub fn spectral_metric(sys: &BiorthonormalSystem, tol: &Tolerance) -> Result<MetricOperator> {
    sys.require_real_spectrum(tol)?;
    let weights = vec![1.0; sys.dim()];
    Ok(MetricOperator::from_parts(
        sys.weighted_left_sum(&weights),
        Provenance::Spectral,
    ))
}

/// `Σₙ sₙ |φₙ⟩⟨φₙ|` for positive scales `sₙ`, another member of the
/// family of positive-definite metrics of the same Hamiltonian.
pub fn symmetry_rescaled_metric(
    sys: &BiorthonormalSystem,
    scales: &[f64],
    tol: &Tolerance,
) -> Result<MetricOperator> {
    if scales.len() != sys.dim() {
        return Err(Error::Shape {
            left: sys.dim(),
            right: scales.len(),
        });
    }
    if let Some(bad) = scales.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
        return Err(Error::Domain(format!(
            "metric scale must be positive, got {bad}"
        )));
    }
    sys.require_real_spectrum(tol)?;
    Ok(MetricOperator::from_parts(
        sys.weighted_left_sum(scales),
        Provenance::Spectral,
    ))
}

/// `‖H†η − ηH‖_max`, the multiplied-through form of `H† = ηHη⁻¹`.
pub fn pseudo_hermiticity_residual(h: &Operator, eta: &MetricOperator) -> Result<f64> {
    h.ensure_same_dim(eta.op())?;
    let sv = eta.op().singular_values();
    let (hi, lo) = (sv[0], sv[sv.len() - 1]);
    if lo.is_nan() || lo <= f64::EPSILON * hi {
        return Err(Error::Singular { singular_value: lo });
    }
    Ok(intertwining_residual(h, eta.op()))
}

/// `‖H†M − MH‖_max` without any requirement on `M`.
pub(crate) fn intertwining_residual(h: &Operator, m: &Operator) -> f64 {
    (&h.adjoint() * m).max_diff(&(m * h))
}

/// Residual threshold `abs_tol + rel_tol·‖H‖‖η‖` used when no explicit one
/// is given.
pub fn residual_threshold(h: &Operator, eta: &MetricOperator, tol: &Tolerance) -> f64 {
    tol.threshold(h.max_norm() * eta.op().max_norm())
}

#[derive(Debug, Clone)]
pub struct EquivalentHermitian {
    /// `h = ρHρ⁻¹`
    pub h: Operator,
    /// `ρ = η₊^{1/2}`
    pub rho: Operator,
    pub rho_inv: Operator,
    /// pseudo-Hermiticity residual of the input pair
    pub residual: f64,
}

/// The Hermitian Hamiltonian `h = ρHρ⁻¹`, `ρ = η₊^{1/2}`, similar to `H`.
pub fn equivalent_hermitian(
    h: &Operator,
    eta: &MetricOperator,
    max_residual: f64,
    tol: &Tolerance,
) -> Result<EquivalentHermitian> {
    let residual = pseudo_hermiticity_residual(h, eta)?;
    if residual > max_residual {
        return Err(Error::ResidualTooLarge {
            residual,
            threshold: max_residual,
        });
    }
    let (rho, rho_inv) = herm_sqrt_inv(eta.op(), tol)?;
    Ok(EquivalentHermitian {
        h: &(&rho * h) * &rho_inv,
        rho,
        rho_inv,
        residual,
    })
}

#[derive(Debug, Clone)]
pub struct COperator {
    /// `C = η₊⁻¹P`
    pub c: Operator,
    /// `‖CH − HC‖_max`
    pub commutator_residual: f64,
    /// `‖C² − I‖_max`; diagnostic only, zero only for special metrics
    pub involution_defect: f64,
    /// `‖H†P − PH‖_max`, whether `H` is P-pseudo-Hermitian
    pub parity_residual: f64,
}

pub fn c_operator(
    h: &Operator,
    eta: &MetricOperator,
    parity: &Operator,
    tol: &Tolerance,
) -> Result<COperator> {
    h.ensure_same_dim(eta.op())?;
    h.ensure_same_dim(parity)?;
    parity.require_hermitian("parity operator", tol)?;
    let id = Operator::identity(parity.dim());
    let p_defect = (parity * parity).max_diff(&id);
    if !tol.accepts(p_defect, 1.0) {
        return Err(Error::Structure {
            what: "parity operator",
            expected: "an involution",
            defect: p_defect,
        });
    }
    let eig = HermitianEigen::new(eta.op(), tol)?;
    if eig.min().is_nan() || eig.min() <= tol.abs_tol {
        return Err(Error::Positivity {
            eigenvalue: eig.min(),
        });
    }
    let eta_inv = eig.apply(|x| 1.0 / x);
    let c = &eta_inv * parity;
    Ok(COperator {
        commutator_residual: (&c * h).max_diff(&(h * &c)),
        involution_defect: (&c * &c).max_diff(&id),
        parity_residual: intertwining_residual(h, parity),
        c,
    })
}

/// Upper-triangular `O` with `O†O = η₊` (adjoint of the Cholesky factor).
pub fn metric_factorization(eta: &MetricOperator, tol: &Tolerance) -> Result<Operator> {
    eta.op().require_hermitian("metric", tol)?;
    let chol = Cholesky::new(eta.op().hermitian_part().into_matrix()).ok_or_else(|| {
        Error::Positivity {
            eigenvalue: HermitianEigen::of_hermitian_part(eta.op()).min(),
        }
    })?;
    Ok(Operator::from_matrix_unchecked(chol.l().adjoint()))
}

#[derive(Debug, Clone)]
pub struct Intertwiner {
    /// `A` with `η₂ = A†η₁A` and `[A, H] = 0`
    pub a: Operator,
    /// `‖A†η₁A − η₂‖_max`
    pub metric_defect: f64,
    /// `‖AH − HA‖_max`
    pub commutator_defect: f64,
}

/// `A = η₁^{−1/2} M^{1/2} η₁^{1/2}` with `M = η₁^{−1/2} η₂ η₁^{−1/2}`.
pub fn metric_intertwiner(
    eta1: &MetricOperator,
    eta2: &MetricOperator,
    h: &Operator,
    tol: &Tolerance,
) -> Result<Intertwiner> {
    eta1.op().ensure_same_dim(eta2.op())?;
    h.ensure_same_dim(eta1.op())?;
    let (s1, s1_inv) = herm_sqrt_inv(eta1.op(), tol)?;
    let m = (&(&s1_inv * eta2.op()) * &s1_inv).hermitian_part();
    let (m_sqrt, _) = herm_sqrt_inv(&m, tol)?;
    let a = &(&s1_inv * &m_sqrt) * &s1;
    let metric_defect = (&(&a.adjoint() * eta1.op()) * &a).max_diff(eta2.op());
    let commutator_defect = (&a * h).max_diff(&(h * &a));
    Ok(Intertwiner {
        a,
        metric_defect,
        commutator_defect,
    })
}
