//! Metric operators for pseudo-Hermitian Hamiltonians.
//!
//! A Hamiltonian `H` is pseudo-Hermitian when some Hermitian invertible `η`
//! satisfies `H† = η H η⁻¹`. This crate builds positive-definite metrics
//! `η₊` in two independent ways and checks them against that relation:
//!
//! * [`spectral`]: from a biorthonormal eigensystem of `H`, `η₊ = Σ |φₙ⟩⟨φₙ|`;
//! * [`perturbative`]: as `η₊ = e^(−Q)` with `Q = Σ Qⱼ εʲ`, solving one
//!   commutator equation per order for `H = H₀ + εH₁`.
//!
//! [`wave`] covers the position-space picture for `H₀ = p²`, `H₁ = i v(x)`,
//! where the first-order equation becomes an inhomogeneous wave equation
//! with a closed-form solution for piecewise-constant potentials.

pub mod error;
pub mod functions;
pub mod operator;
pub mod perturbative;
pub mod random;
pub mod spectral;
pub mod tolerance;
pub mod wave;

mod eigen;

pub use error::{Error, Result};
pub use functions::{herm_exp, herm_sqrt_inv, HermitianEigen};
pub use num_complex::Complex64 as C64;
pub use operator::{bch_conjugate, classify, nested_commutator, Classification, Operator};
pub use perturbative::{
    master_formula_coefficients, master_formula_rhs, master_order_equation_rhs, metric_from_series,
    order_equation_rhs, order_residual, scaling_exponent, solve_q_series, sylvester_solve,
    OperatorSeries, QSeries, ScalingFit, SplitHamiltonian,
};
pub use spectral::{
    biorthonormal_eigensystem, c_operator, equivalent_hermitian, metric_factorization,
    metric_intertwiner, pseudo_hermiticity_residual, residual_threshold, spectral_metric,
    spectrum_is_real, symmetry_rescaled_metric, BiorthonormalSystem, MetricOperator, Provenance,
};
pub use tolerance::Tolerance;
pub use wave::{
    discretize_schroedinger, general_kernel, hermiticity_defect, jump_condition_defect,
    kernel_to_matrix, offdiagonal_commutator_check, particular_kernel_q1, potential_antiderivative,
    step_q1_closed_form, Antiderivative, Grid, HomogeneousPair, KernelFunction, PairConstraint,
    PiecewisePotential,
};
