use crate::operator::Operator;

/// The operations the master formula needs: commutators and real linear
/// combinations.
pub trait CommutatorAlgebra: Clone {
    fn commutator(&self, other: &Self) -> Self;
    fn zero_like(&self) -> Self;
    fn add_scaled(&mut self, other: &Self, factor: f64);
}

impl CommutatorAlgebra for Operator {
    fn commutator(&self, other: &Self) -> Self {
        Operator::commutator(self, other)
    }

    fn zero_like(&self) -> Self {
        Operator::zeros(self.dim())
    }

    fn add_scaled(&mut self, other: &Self, factor: f64) {
        *self += &other.scale(factor);
    }
}

/// Operator-valued polynomial in `ε`, truncated after a fixed order.
///
/// Products drop every power above the truncation order, so commutators of
/// series are exact through that order.
#[derive(Debug, Clone)]
pub struct OperatorSeries {
    coeffs: Vec<Operator>,
}

impl OperatorSeries {
    /// A constant (ε-independent) series.
    pub fn constant(op: &Operator, order: usize) -> Self {
        let mut coeffs = vec![Operator::zeros(op.dim()); order + 1];
        coeffs[0] = op.clone();
        Self { coeffs }
    }

    /// `Σ_{j≥1} terms[j−1] εʲ`, truncated at `order`.
    pub fn from_terms(terms: &[Operator], dim: usize, order: usize) -> Self {
        let mut coeffs = vec![Operator::zeros(dim); order + 1];
        for (j, t) in terms.iter().enumerate().take(order) {
            coeffs[j + 1] = t.clone();
        }
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, power: usize) -> &Operator {
        &self.coeffs[power]
    }

    fn is_zero(op: &Operator) -> bool {
        op.matrix().iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }
}

impl CommutatorAlgebra for OperatorSeries {
    fn commutator(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let dim = self.coeffs[0].dim();
        let live_a: Vec<bool> = self.coeffs.iter().map(|c| !Self::is_zero(c)).collect();
        let live_b: Vec<bool> = other.coeffs.iter().map(|c| !Self::is_zero(c)).collect();
        let mut coeffs = vec![Operator::zeros(dim); order + 1];
        for (n, out) in coeffs.iter_mut().enumerate() {
            for (a, &live) in live_a.iter().enumerate().take(n + 1) {
                let b = n - a;
                if live && live_b[b] {
                    *out += &self.coeffs[a].commutator(&other.coeffs[b]);
                }
            }
        }
        Self { coeffs }
    }

    fn zero_like(&self) -> Self {
        let dim = self.coeffs[0].dim();
        Self {
            coeffs: vec![Operator::zeros(dim); self.coeffs.len()],
        }
    }

    fn add_scaled(&mut self, other: &Self, factor: f64) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            if !Self::is_zero(b) {
                *a += &b.scale(factor);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn series_commutator_matches_pointwise_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let a: Vec<Operator> = (0..3).map(|_| random::complex(3, &mut rng)).collect();
        let b: Vec<Operator> = (0..3).map(|_| random::complex(3, &mut rng)).collect();
        let sa = OperatorSeries::from_terms(&a, 3, 6);
        let sb = OperatorSeries::from_terms(&b, 3, 6);
        let comm = sa.commutator(&sb);
        // both factors start at ε¹, so the product is exact through ε⁶
        let eval = |terms: &[Operator], e: f64| {
            let mut out = Operator::zeros(3);
            for (j, t) in terms.iter().enumerate() {
                out += &t.scale(e.powi(j as i32 + 1));
            }
            out
        };
        let e = 0.3;
        let direct = eval(&a, e).commutator(&eval(&b, e));
        let mut summed = Operator::zeros(3);
        for p in 0..=comm.order() {
            summed += &comm.coeff(p).scale(e.powi(p as i32));
        }
        assert!(summed.max_diff(&direct) < 1e-14);
    }
}
