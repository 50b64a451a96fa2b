//! Fixtures shared by the criterion benches.

use phq_core::{random, Operator, SplitHamiltonian, Tolerance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn random_split(n: usize, seed: u64) -> SplitHamiltonian {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SplitHamiltonian::new(
        random::hermitian(n, &mut rng),
        random::anti_hermitian(n, &mut rng),
        0.05,
        &Tolerance::default(),
    )
    .expect("random split is well-formed")
}

pub fn random_real_spectrum(n: usize, seed: u64) -> Operator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random::real_spectrum(n, 100.0, &mut rng).hamiltonian
}
