//! Position-space picture for `H₀ = p²`, `H₁ = i v(x)`.
//!
//! Writing `Q₁(x,y) = ⟨x|Q₁|y⟩`, the first-order equation `[H₀,Q₁] = −2H₁`
//! becomes `(−∂ₓ² + ∂ᵧ²) Q₁ = −2i v(x) δ(x−y)`. In characteristic
//! coordinates `s = x+y`, `t = x−y` the operator is `−4∂ₛ∂ₜ`, which gives
//! the particular solution `Q₁ᵖ = (i/2) V(s/2) sign(t)` with `V' = v`,
//! `V(0) = 0`. Any `f(x−y) + g(x+y)` may be added; Hermiticity of the
//! kernel restricts `f` and `g` (see [`HomogeneousPair`]).

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::operator::Operator;
use crate::perturbative::SplitHamiltonian;
use crate::tolerance::Tolerance;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Real piecewise-constant potential with compact support.
///
/// `values[k]` holds on the open interval between `breakpoints[k−1]` and
/// `breakpoints[k]`; the first and last values extend to `∓∞` and must be
/// zero. At a breakpoint the potential takes the mean of its two sides.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePotential {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewisePotential {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != breakpoints.len() + 1 {
            return Err(Error::Domain(format!(
                "{} breakpoints need {} values, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                values.len()
            )));
        }
        if breakpoints.iter().chain(&values).any(|x| !x.is_finite()) {
            return Err(Error::Domain("potential data must be finite".into()));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        if values[0] != 0.0 || values[values.len() - 1] != 0.0 {
            return Err(Error::Domain(
                "potential must vanish outside its outermost breakpoints".into(),
            ));
        }
        Ok(Self {
            breakpoints,
            values,
        })
    }

    pub fn zero() -> Self {
        Self {
            breakpoints: Vec::new(),
            values: vec![0.0],
        }
    }

    /// `v(x) = −sign(x)` on `[−1, 1]`, zero outside.
    pub fn step() -> Self {
        Self {
            breakpoints: vec![-1.0, 0.0, 1.0],
            values: vec![0.0, 1.0, -1.0, 0.0],
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, x: f64) -> f64 {
        let idx = self.breakpoints.partition_point(|&b| b < x);
        if idx < self.breakpoints.len() && self.breakpoints[idx] == x {
            0.5 * (self.values[idx] + self.values[idx + 1])
        } else {
            self.values[idx]
        }
    }

    /// Outermost breakpoints, `None` for the zero potential.
    pub fn support(&self) -> Option<(f64, f64)> {
        Some((*self.breakpoints.first()?, *self.breakpoints.last()?))
    }

    fn extent(&self) -> f64 {
        self.support().map_or(1.0, |(a, b)| a.abs().max(b.abs()))
    }
}

/// `V(x) = ∫₀ˣ v(u) du`, continuous and piecewise linear.
#[derive(Debug, Clone)]
pub struct Antiderivative {
    knots: Vec<f64>,
    at_knots: Vec<f64>,
    /// slope left of `knots[0]`, between consecutive knots, right of the last
    slopes: Vec<f64>,
}

impl Antiderivative {
    pub fn eval(&self, x: f64) -> f64 {
        let i = self.knots.partition_point(|&k| k <= x);
        if i == 0 {
            self.at_knots[0] + self.slopes[0] * (x - self.knots[0])
        } else {
            self.at_knots[i - 1] + self.slopes[i] * (x - self.knots[i - 1])
        }
    }
}

pub fn potential_antiderivative(v: &PiecewisePotential) -> Antiderivative {
    let mut knots: Vec<f64> = v.breakpoints.clone();
    if let Err(pos) = knots.binary_search_by(|k| k.total_cmp(&0.0)) {
        knots.insert(pos, 0.0);
    }
    let k = knots.len();
    let mut slopes = Vec::with_capacity(k + 1);
    slopes.push(v.values[0]);
    for w in knots.windows(2) {
        slopes.push(v.eval(0.5 * (w[0] + w[1])));
    }
    slopes.push(v.values[v.values.len() - 1]);

    let zero = knots
        .iter()
        .position(|&x| x == 0.0)
        .expect("origin is a knot");
    let mut at_knots = vec![0.0; k];
    for i in zero + 1..k {
        at_knots[i] = at_knots[i - 1] + slopes[i] * (knots[i] - knots[i - 1]);
    }
    for i in (0..zero).rev() {
        at_knots[i] = at_knots[i + 1] - slopes[i + 1] * (knots[i + 1] - knots[i]);
    }
    Antiderivative {
        knots,
        at_knots,
        slopes,
    }
}

type KernelFn = dyn Fn(f64, f64) -> Complex64 + Send + Sync;

/// A two-variable kernel `K(x, y)` on the box `[−L, L]²`.
#[derive(Clone)]
pub struct KernelFunction {
    eval: Arc<KernelFn>,
    singular_line: bool,
    half_width: f64,
}

impl fmt::Debug for KernelFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelFunction")
            .field("singular_line", &self.singular_line)
            .field("half_width", &self.half_width)
            .finish_non_exhaustive()
    }
}

impl KernelFunction {
    pub fn new(
        eval: impl Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
        singular_line: bool,
        half_width: f64,
    ) -> Self {
        Self {
            eval: Arc::new(eval),
            singular_line,
            half_width,
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        (self.eval)(x, y)
    }

    /// Whether the kernel jumps across `x = y`.
    pub fn singular_line(&self) -> bool {
        self.singular_line
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn with_half_width(mut self, half_width: f64) -> Self {
        self.half_width = half_width;
        self
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `Q₁ᵖ(x,y) = (i/2) V((x+y)/2) sign(x−y)` with `sign(0) = 0`. The sampling
/// box defaults to three times the support extent.
pub fn particular_kernel_q1(v: &PiecewisePotential) -> KernelFunction {
    let anti = potential_antiderivative(v);
    let half_width = 3.0 * v.extent();
    KernelFunction::new(
        move |x, y| I * (0.5 * anti.eval(0.5 * (x + y)) * sign(x - y)),
        true,
        half_width,
    )
}

/// The closed form `(i/8)(|x+y+2| + |x+y−2| − 2|x+y| − 4) sign(x−y)` of
/// `Q₁ᵖ` for [`PiecewisePotential::step`].
pub fn step_q1_closed_form(x: f64, y: f64) -> Complex64 {
    let s = x + y;
    I * ((s + 2.0).abs() + (s - 2.0).abs() - 2.0 * s.abs() - 4.0) * (sign(x - y) / 8.0)
}

/// One of the three conditions under which `f(x−y) + g(x+y)` is Hermitian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairConstraint {
    /// `Re f(−x) = Re f(x)`
    EvenReal,
    /// `Im g(x) = c`
    ConstantImag,
    /// `Im f(−x) = −Im f(x) − 2c`
    OddImag,
}

impl PairConstraint {
    pub const ALL: [PairConstraint; 3] = [Self::EvenReal, Self::ConstantImag, Self::OddImag];
}

type ScalarFn = dyn Fn(f64) -> Complex64 + Send + Sync;

/// Homogeneous solution `f(x−y) + g(x+y)` of the wave equation.
///
/// The kernel is Hermitian iff `Re f` is even, `Im g ≡ c` and
/// `Im f(−x) = −Im f(x) − 2c`.
#[derive(Clone)]
pub struct HomogeneousPair {
    f: Arc<ScalarFn>,
    g: Arc<ScalarFn>,
    c: f64,
}

impl fmt::Debug for HomogeneousPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HomogeneousPair")
            .field("c", &self.c)
            .finish_non_exhaustive()
    }
}

impl HomogeneousPair {
    pub fn new(
        f: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        g: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        c: f64,
    ) -> Self {
        Self {
            f: Arc::new(f),
            g: Arc::new(g),
            c,
        }
    }

    pub fn zero() -> Self {
        Self::new(
            |_| Complex64::new(0.0, 0.0),
            |_| Complex64::new(0.0, 0.0),
            0.0,
        )
    }

    pub fn f(&self, t: f64) -> Complex64 {
        (self.f)(t)
    }

    pub fn g(&self, s: f64) -> Complex64 {
        (self.g)(s)
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Largest violation of the three constraints over `xs`.
    pub fn constraint_defect(&self, xs: &[f64]) -> f64 {
        xs.iter()
            .flat_map(|&x| PairConstraint::ALL.map(|k| self.constraint_violation(k, x)))
            .fold(0.0, f64::max)
    }

    /// Violation of a single constraint at `x`.
    pub fn constraint_violation(&self, constraint: PairConstraint, x: f64) -> f64 {
        match constraint {
            PairConstraint::EvenReal => (self.f(-x).re - self.f(x).re).abs(),
            PairConstraint::ConstantImag => (self.g(x).im - self.c).abs(),
            PairConstraint::OddImag => (self.f(-x).im + self.f(x).im + 2.0 * self.c).abs(),
        }
    }

    /// The kernel `f(x−y) + g(x+y)` alone.
    pub fn kernel(&self, half_width: f64) -> KernelFunction {
        let pair = self.clone();
        KernelFunction::new(move |x, y| pair.f(x - y) + pair.g(x + y), false, half_width)
    }
}

/// Sample points covering the ranges of `x − y` and `x + y` over the box.
fn constraint_samples(half_width: f64) -> Vec<f64> {
    let span = 2.0 * half_width;
    let n = 257;
    let mut xs: Vec<f64> = (0..n)
        .map(|i| -span + 2.0 * span * i as f64 / (n - 1) as f64)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    xs.extend((0..256).map(|_| rng.random_range(-span..span)));
    xs
}

/// `particular + f(x−y) + g(x+y)`, after checking the Hermiticity
/// constraints of the pair.
pub fn general_kernel(
    particular: &KernelFunction,
    hom: &HomogeneousPair,
    tol: &Tolerance,
) -> Result<KernelFunction> {
    let defect = hom.constraint_defect(&constraint_samples(particular.half_width));
    if defect > tol.abs_tol {
        return Err(Error::Structure {
            what: "homogeneous pair",
            expected: "compatible with a Hermitian kernel",
            defect,
        });
    }
    let p = particular.clone();
    let h = hom.clone();
    Ok(KernelFunction::new(
        move |x, y| p.eval(x, y) + h.f(x - y) + h.g(x + y),
        particular.singular_line,
        particular.half_width,
    ))
}

/// `max |K(x,y)* − K(y,x)|` over random off-diagonal pairs in the box.
pub fn hermiticity_defect(k: &KernelFunction, samples: usize, seed: u64) -> Result<f64> {
    if samples < 100 {
        return Err(Error::Domain(format!(
            "need at least 100 samples, got {samples}"
        )));
    }
    let l = k.half_width;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut taken = 0;
    while taken < samples {
        let x = rng.random_range(-l..=l);
        let y = rng.random_range(-l..=l);
        if x == y {
            continue;
        }
        taken += 1;
        worst = worst.max((k.eval(x, y).conj() - k.eval(y, x)).norm());
    }
    Ok(worst)
}

/// `max over xs of |K(x+δ, x−δ) − K(x−δ, x+δ) − iV(x)|`: the jump across
/// `x = y` that encodes the `−2iv(x)δ(x−y)` source.
pub fn jump_condition_defect(
    k: &KernelFunction,
    v: &PiecewisePotential,
    delta: f64,
    xs: &[f64],
) -> Result<f64> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let anti = potential_antiderivative(v);
    Ok(xs
        .iter()
        .map(|&x| {
            let jump = k.eval(x + delta, x - delta) - k.eval(x - delta, x + delta);
            (jump - I * anti.eval(x)).norm()
        })
        .fold(0.0, f64::max))
}

/// Uniform grid `xᵢ = −L + iΔx`, `Δx = 2L/(N−1)`, on `[−L, L]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub half_width: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::Domain(format!(
                "L must be positive, got {half_width}"
            )));
        }
        if n < 2 {
            return Err(Error::Domain(format!(
                "grid needs at least 2 points, got {n}"
            )));
        }
        Ok(Self { half_width, n })
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / (self.n - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }
}

/// Central-difference `p² = −∂ₓ²` with Dirichlet ends and `H₁ = i·diag(v(xᵢ))`.
pub fn discretize_schroedinger(
    v: &PiecewisePotential,
    half_width: f64,
    n: usize,
    epsilon: f64,
    tol: &Tolerance,
) -> Result<SplitHamiltonian> {
    if n < 16 {
        return Err(Error::Domain(format!(
            "grid needs at least 16 points, got {n}"
        )));
    }
    let grid = Grid::new(half_width, n)?;
    if let Some((lo, hi)) = v.support() {
        if !(lo > -half_width && hi < half_width) {
            return Err(Error::Domain(format!(
                "potential support [{lo}, {hi}] is not inside (−{half_width}, {half_width})"
            )));
        }
    }
    let inv_dx2 = 1.0 / (grid.dx() * grid.dx());
    let h0 = DMatrix::from_fn(n, n, |i, j| {
        let value = if i == j {
            2.0 * inv_dx2
        } else if i.abs_diff(j) == 1 {
            -inv_dx2
        } else {
            0.0
        };
        Complex64::new(value, 0.0)
    });
    let h1 = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            I * v.eval(grid.point(i))
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    SplitHamiltonian::new(Operator::new(h0)?, Operator::new(h1)?, epsilon, tol)
}

/// `Mᵢⱼ = K(xᵢ, xⱼ) Δx`, the quadrature form of the integral operator.
pub fn kernel_to_matrix(k: &KernelFunction, half_width: f64, n: usize) -> Result<Operator> {
    let grid = Grid::new(half_width, n)?;
    let xs = grid.points();
    let dx = grid.dx();
    Operator::new(DMatrix::from_fn(n, n, |i, j| k.eval(xs[i], xs[j]) * dx))
}

/// Max-norm of `[H₀, M] + 2H₁` away from the diagonal band `|i−j| ≤
/// band_exclude` and from the three outermost rows and columns.
pub fn offdiagonal_commutator_check(
    split: &SplitHamiltonian,
    m: &Operator,
    band_exclude: usize,
) -> Result<f64> {
    split.h0().ensure_same_dim(m)?;
    if band_exclude < 2 {
        return Err(Error::Domain(format!(
            "band_exclude must be at least 2, got {band_exclude}"
        )));
    }
    let n = m.dim();
    let defect = &split.h0().commutator(m) + &split.h1().scale(2.0);
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            if i.abs_diff(j) > band_exclude && i.min(j) > 2 && i.max(j) + 3 < n {
                worst = worst.max(defect.get(i, j).norm());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn potential_validation() {
        assert!(PiecewisePotential::new(vec![0.0, 0.0], vec![0.0, 1.0, 0.0]).is_err());
        assert!(PiecewisePotential::new(vec![0.0], vec![1.0, 0.0]).is_err());
        assert!(PiecewisePotential::new(vec![0.0], vec![0.0]).is_err());
        assert!(PiecewisePotential::new(vec![-1.0, 1.0], vec![0.0, 2.5, 0.0]).is_ok());
    }

    #[test]
    fn step_potential_values() {
        let v = PiecewisePotential::step();
        assert_eq!(v.eval(-0.5), 1.0);
        assert_eq!(v.eval(0.5), -1.0);
        assert_eq!(v.eval(0.0), 0.0);
        assert_eq!(v.eval(2.0), 0.0);
        assert_eq!(v.eval(1.0), -0.5);
    }

    #[test]
    fn antiderivative_examples() {
        let zero = potential_antiderivative(&PiecewisePotential::zero());
        assert_eq!(zero.eval(1.7), 0.0);
        assert_eq!(zero.eval(-3.0), 0.0);

        let step = potential_antiderivative(&PiecewisePotential::step());
        assert_eq!(step.eval(0.0), 0.0);
        assert_eq!(step.eval(0.5), -0.5);
        assert_eq!(step.eval(3.0), -1.0);
        assert_eq!(step.eval(-0.25), -0.25);
        assert_eq!(step.eval(-7.0), -1.0);
    }

    #[test]
    fn antiderivative_without_breakpoint_at_origin() {
        let v = PiecewisePotential::new(vec![1.0, 2.0], vec![0.0, 3.0, 0.0]).unwrap();
        let anti = potential_antiderivative(&v);
        assert_eq!(anti.eval(0.5), 0.0);
        assert_eq!(anti.eval(1.5), 1.5);
        assert_eq!(anti.eval(5.0), 3.0);
    }

    #[test]
    fn particular_kernel_spot_values() {
        let k = particular_kernel_q1(&PiecewisePotential::step());
        let q = k.eval(0.5, 0.3);
        assert!((q - Complex64::new(0.0, -0.2)).norm() < 1e-15);
        assert!((step_q1_closed_form(0.5, 0.3) - Complex64::new(0.0, -0.2)).norm() < 1e-15);
        assert_eq!(k.eval(0.7, 0.7), Complex64::new(0.0, 0.0));
        assert!(k.singular_line());
    }

    #[test]
    fn general_kernel_examples() {
        let p = particular_kernel_q1(&PiecewisePotential::step());
        let same = general_kernel(&p, &HomogeneousPair::zero(), &tol()).unwrap();
        assert_eq!(same.eval(0.4, -1.1), p.eval(0.4, -1.1));

        let real_even = HomogeneousPair::new(
            |t| Complex64::new(t * t, 0.0),
            |_| Complex64::new(0.0, 0.0),
            0.0,
        );
        let k = general_kernel(&p, &real_even, &tol()).unwrap();
        assert!(hermiticity_defect(&k, 1000, 1).unwrap() < 1e-12);

        let bad = HomogeneousPair::new(|_| Complex64::new(0.0, 0.0), |_| I, 1.0);
        assert!(matches!(
            general_kernel(&p, &bad, &tol()),
            Err(Error::Structure { defect, .. }) if (defect - 2.0).abs() < 1e-15
        ));
    }

    #[test]
    fn hermiticity_defect_examples() {
        let k = particular_kernel_q1(&PiecewisePotential::step());
        assert!(hermiticity_defect(&k, 500, 3).unwrap() <= 1e-13);
        let constant = KernelFunction::new(|_, _| I, false, 1.0);
        assert!((hermiticity_defect(&constant, 100, 3).unwrap() - 2.0).abs() < 1e-15);
        assert!(hermiticity_defect(&constant, 99, 3).is_err());
    }

    #[test]
    fn jump_condition_examples() {
        let zero = KernelFunction::new(|_, _| Complex64::new(0.0, 0.0), false, 1.0);
        let d =
            jump_condition_defect(&zero, &PiecewisePotential::zero(), 1e-3, &[0.0, 0.5]).unwrap();
        assert_eq!(d, 0.0);

        let v = PiecewisePotential::step();
        let k = particular_kernel_q1(&v);
        let jump = k.eval(0.5 + 1e-6, 0.5 - 1e-6) - k.eval(0.5 - 1e-6, 0.5 + 1e-6);
        assert!((jump - Complex64::new(0.0, -0.5)).norm() < 1e-12);

        let xs: Vec<f64> = (0..41).map(|i| -2.0 + 0.1 * i as f64).collect();
        let base = jump_condition_defect(&k, &v, 1e-3, &xs).unwrap();
        let real_even = HomogeneousPair::new(
            |t| Complex64::new((1.0 + t * t).ln(), 0.0),
            |s| Complex64::new(s.sin(), 0.0),
            0.0,
        );
        let gk = general_kernel(&k, &real_even, &tol()).unwrap();
        let gauged = jump_condition_defect(&gk, &v, 1e-3, &xs).unwrap();
        assert!((gauged - base).abs() <= 1e-10);
        assert!(jump_condition_defect(&k, &v, 0.0, &xs).is_err());
    }

    #[test]
    fn discretization_structure() {
        let tol = tol();
        let split =
            discretize_schroedinger(&PiecewisePotential::zero(), 2.0, 17, 0.1, &tol).unwrap();
        assert_eq!(split.h1().max_norm(), 0.0);
        let dx: f64 = 4.0 / 16.0;
        let h0 = split.h0();
        assert_eq!(h0.get(3, 3).re, 2.0 / (dx * dx));
        assert_eq!(h0.get(3, 4).re, -1.0 / (dx * dx));
        assert_eq!(h0.get(3, 5).re, 0.0);
        // Dirichlet ends: only one neighbour inside the grid
        let nonzero = |i: usize| (0..17).filter(|&j| h0.get(i, j).norm() > 0.0).count();
        assert_eq!(nonzero(0), 2);
        assert_eq!(nonzero(16), 2);
        assert_eq!(nonzero(8), 3);

        let v = PiecewisePotential::step();
        let split = discretize_schroedinger(&v, 4.0, 129, 0.1, &tol).unwrap();
        let grid = Grid::new(4.0, 129).unwrap();
        for (i, x) in grid.points().into_iter().enumerate() {
            let d = split.h1().get(i, i);
            assert_eq!(d.re, 0.0);
            if x.abs() < 1.0 {
                assert_eq!(d.im, -sign(x));
            } else if x.abs() > 1.0 {
                assert_eq!(d.im, 0.0);
            }
        }

        assert!(discretize_schroedinger(&v, 1.0, 129, 0.1, &tol).is_err());
        assert!(discretize_schroedinger(&v, 4.0, 15, 0.1, &tol).is_err());
    }

    #[test]
    fn kernel_matrix_examples() {
        let zero = KernelFunction::new(|_, _| Complex64::new(0.0, 0.0), false, 1.0);
        assert_eq!(kernel_to_matrix(&zero, 4.0, 33).unwrap().max_norm(), 0.0);

        let k = particular_kernel_q1(&PiecewisePotential::step());
        let m = kernel_to_matrix(&k, 4.0, 129).unwrap();
        assert!(m.hermiticity_defect() <= 1e-12);
        for z in m.matrix().iter() {
            assert_eq!(z.re, 0.0);
        }
        for i in 0..129 {
            for j in 0..129 {
                assert_eq!(m.get(i, j).im, -m.get(j, i).im);
            }
        }
    }

    #[test]
    fn commutator_check_examples() {
        let tol = tol();
        let split =
            discretize_schroedinger(&PiecewisePotential::zero(), 4.0, 33, 0.1, &tol).unwrap();
        assert_eq!(
            offdiagonal_commutator_check(&split, &Operator::zeros(33), 2).unwrap(),
            0.0
        );
        assert!(offdiagonal_commutator_check(&split, &Operator::zeros(33), 1).is_err());
    }

    #[test]
    fn exact_kernel_satisfies_discrete_wave_equation_off_band() {
        // On a uniform grid the five-point stencil of −∂ₓ² + ∂ᵧ² annihilates
        // any F(x+y)·sign(x−y) away from the diagonal: shifting x or y by
        // ±Δx moves x+y by the same ±Δx.
        let v = PiecewisePotential::step();
        for n in [129, 257] {
            let split = discretize_schroedinger(&v, 4.0, n, 0.1, &tol()).unwrap();
            let m = kernel_to_matrix(&particular_kernel_q1(&v), 4.0, n).unwrap();
            let defect = offdiagonal_commutator_check(&split, &m, 2).unwrap();
            assert!(defect < 1e-10, "N={n}: {defect:e}");
        }
    }

    #[test]
    fn unrelated_matrix_is_a_negative_control() {
        let v = PiecewisePotential::step();
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let mut last = 0.0;
        for n in [129, 257] {
            let split = discretize_schroedinger(&v, 4.0, n, 0.1, &tol()).unwrap();
            let m = random::hermitian(n, &mut rng).scale(0.01);
            let defect = offdiagonal_commutator_check(&split, &m, 2).unwrap();
            assert!(defect > 1.0);
            assert!(defect > last);
            last = defect;
        }
    }

    #[test]
    fn continuum_wave_operator_vanishes_off_diagonal() {
        // Finite differences with a step h unrelated to any grid, at points
        // away from x = y and from the kink lines x + y ∈ {−2, 0, 2}.
        let k = particular_kernel_q1(&PiecewisePotential::step());
        let mut rng = ChaCha8Rng::seed_from_u64(72);
        let h = 1e-3;
        let mut checked = 0;
        while checked < 500 {
            let x = rng.random_range(-3.0..3.0);
            let y = rng.random_range(-3.0..3.0);
            let s: f64 = x + y;
            if (x - y).abs() <= 3.0 * h || [-2.0, 0.0, 2.0].iter().any(|b| (s - b).abs() <= 3.0 * h)
            {
                continue;
            }
            checked += 1;
            let dxx = k.eval(x + h, y) - k.eval(x, y) * 2.0 + k.eval(x - h, y);
            let dyy = k.eval(x, y + h) - k.eval(x, y) * 2.0 + k.eval(x, y - h);
            let wave = (dyy - dxx) / (h * h);
            assert!(wave.norm() < 1e-8, "({x}, {y}): {wave}");
        }
    }
}
