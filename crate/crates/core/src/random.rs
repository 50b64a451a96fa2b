//! Seeded random instance generators for property tests, benchmarks and
//! the built-in CLI instances.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::operator::Operator;
use crate::wave::{HomogeneousPair, PairConstraint};

fn entry<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Entries with real and imaginary parts uniform in `[−1, 1)`.
pub fn complex<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Operator {
    Operator::from_matrix_unchecked(DMatrix::from_fn(n, n, |_, _| entry(rng)))
}

pub fn hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Operator {
    complex(n, rng).hermitian_part()
}

pub fn anti_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Operator {
    complex(n, rng).anti_hermitian_part()
}

/// Haar-like unitary from the QR factor of a random matrix.
pub fn unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Operator {
    let q = complex(n, rng).into_matrix().qr().q();
    Operator::from_matrix_unchecked(q)
}

/// Hermitian positive-definite matrix with spectrum in `[1/cond, 1]`,
/// both endpoints attained when `n ≥ 2`.
pub fn positive_definite<R: Rng + ?Sized>(n: usize, cond: f64, rng: &mut R) -> Operator {
    let log_cond = cond.max(1.0).ln();
    let spectrum: Vec<f64> = (0..n)
        .map(|i| match i {
            0 => 1.0,
            1 => 1.0 / cond.max(1.0),
            _ => (-rng.random_range(0.0..=log_cond)).exp(),
        })
        .collect();
    let u = unitary(n, rng);
    let d = Operator::real_diagonal(&spectrum).expect("finite spectrum");
    (&(&u * &d) * &u.adjoint()).hermitian_part()
}

/// Invertible matrix `U Σ V†` with singular values in `[1, cond]`.
pub fn invertible<R: Rng + ?Sized>(n: usize, cond: f64, rng: &mut R) -> Operator {
    let sigma: Vec<f64> = (0..n)
        .map(|i| match i {
            0 => 1.0,
            _ => rng.random_range(1.0..=cond.max(1.0)),
        })
        .collect();
    let u = unitary(n, rng);
    let v = unitary(n, rng);
    let d = Operator::real_diagonal(&sigma).expect("finite spectrum");
    &(&u * &d) * &v.adjoint()
}

/// A diagonalizable matrix with real spectrum, built as `S·diag(E)·S⁻¹`.
#[derive(Debug, Clone)]
pub struct RealSpectrumInstance {
    pub hamiltonian: Operator,
    pub similarity: Operator,
    pub eigenvalues: Vec<f64>,
}

/// Eigenvalues uniform in `[−5, 5]`; `cond(S) ≤ cond`.
pub fn real_spectrum<R: Rng + ?Sized>(n: usize, cond: f64, rng: &mut R) -> RealSpectrumInstance {
    let mut eigenvalues: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
    eigenvalues.sort_by(f64::total_cmp);
    let s = invertible(n, cond, rng);
    let s_inv = s.try_inverse().expect("well-conditioned similarity");
    let d = Operator::real_diagonal(&eigenvalues).expect("finite spectrum");
    RealSpectrumInstance {
        hamiltonian: &(&s * &d) * &s_inv,
        similarity: s,
        eigenvalues,
    }
}

/// Hermitian `H₀` with distinct eigenvalues and anti-Hermitian `H₁` whose
/// diagonal vanishes in the eigenbasis of `H₀`, so that `[H₀,Q₁] = −2H₁` is
/// solvable. Higher orders may still be obstructed when `n ≥ 3`.
pub fn first_order_solvable_split<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (Operator, Operator) {
    let spectrum = distinct_spectrum(n, rng);
    let u = unitary(n, rng);
    let d = Operator::real_diagonal(&spectrum).expect("finite spectrum");
    let mut a = anti_hermitian(n, rng).into_matrix();
    a.fill_diagonal(Complex64::new(0.0, 0.0));
    let a = Operator::from_matrix_unchecked(a);
    let h0 = (&(&u * &d) * &u.adjoint()).hermitian_part();
    let h1 = (&(&u * &a) * &u.adjoint()).anti_hermitian_part();
    (h0, h1)
}

/// Real `H₀` and purely imaginary `H₁ = iS` with `J H₀ J = H₀` and
/// `J S J = −S`, `J` the exchange matrix. `H₀ + εH₁` commutes with `J∘K`
/// (`K` complex conjugation), so its spectrum stays real for small `ε`
/// and every order of the metric equation is solvable. Eigenvalues of `H₀`
/// are at least `0.1` apart.
pub fn pt_symmetric_split<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (Operator, Operator) {
    let sym = |rng: &mut R| {
        let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        (&m + m.transpose()) * 0.5
    };
    let flip = |m: &DMatrix<f64>| DMatrix::from_fn(n, n, |i, j| m[(n - 1 - i, n - 1 - j)]);
    let h0 = loop {
        let a = sym(rng);
        let h0 = (&a + flip(&a)) * 0.5;
        let mut e: Vec<f64> = h0.clone().symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(f64::total_cmp);
        if e.windows(2).all(|w| w[1] - w[0] >= 0.1) {
            break h0;
        }
    };
    let b = sym(rng);
    let s = (&b - flip(&b)) * 0.5;
    (
        Operator::from_matrix_unchecked(h0.map(|x| Complex64::new(x, 0.0))),
        Operator::from_matrix_unchecked(s.map(|x| Complex64::new(0.0, x))),
    )
}

/// Smooth homogeneous pair built from random trigonometric and polynomial
/// pieces. With `violated = None` all three Hermiticity constraints hold;
/// otherwise exactly the named one fails by an amount of order `0.1`.
pub fn homogeneous_pair<R: Rng + ?Sized>(
    violated: Option<PairConstraint>,
    rng: &mut R,
) -> HomogeneousPair {
    let mut draw = |lo: f64, hi: f64| rng.random_range(lo..hi);
    let (a, b, p) = (draw(-1.0, 1.0), draw(0.5, 2.0), draw(-0.3, 0.3));
    let (d, e, h) = (draw(-1.0, 1.0), draw(0.5, 2.0), draw(-0.1, 0.1));
    let (u, w, r) = (draw(-1.0, 1.0), draw(0.5, 2.0), draw(-0.5, 0.5));
    let c = draw(-1.0, 1.0);
    let bump = draw(0.2, 0.5) * if draw(0.0, 1.0) < 0.5 { -1.0 } else { 1.0 };

    let (odd_re, shift_im, even_im) = match violated {
        None => (0.0, 0.0, 0.0),
        Some(PairConstraint::EvenReal) => (bump, 0.0, 0.0),
        Some(PairConstraint::ConstantImag) => (0.0, bump, 0.0),
        Some(PairConstraint::OddImag) => (0.0, 0.0, bump),
    };
    HomogeneousPair::new(
        move |t| {
            let re = a * (b * t).cos() + p * t * t + odd_re * t.sin();
            let im = d * (e * t).sin() + h * t * t * t - c + even_im * (1.0 + t * t);
            Complex64::new(re, im)
        },
        move |s| Complex64::new(u * (w * s).sin() + r * s, c + shift_im * (1.0 + s.cos())),
        c,
    )
}

/// Sorted eigenvalues in `[−3, 3]` with pairwise gaps of at least `0.1`.
fn distinct_spectrum<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let mut e: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        e.sort_by(f64::total_cmp);
        if e.windows(2).all(|w| w[1] - w[0] >= 0.1) {
            return e;
        }
    }
}
