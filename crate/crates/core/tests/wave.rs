use phq_core::random::homogeneous_pair;
use phq_core::{
    general_kernel, hermiticity_defect, jump_condition_defect, particular_kernel_q1,
    step_q1_closed_form, HomogeneousPair, KernelFunction, PairConstraint, PiecewisePotential,
    Tolerance,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unchecked_sum(p: &KernelFunction, hom: &HomogeneousPair) -> KernelFunction {
    let (p2, h) = (p.clone(), hom.clone());
    KernelFunction::new(
        move |x, y| p2.eval(x, y) + h.f(x - y) + h.g(x + y),
        true,
        p.half_width(),
    )
}

#[test]
fn particular_kernel_matches_closed_form() {
    let k = particular_kernel_q1(&PiecewisePotential::step());
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10_000 {
        let (x, y) = (rng.random_range(-3.0..=3.0), rng.random_range(-3.0..=3.0));
        assert!((k.eval(x, y) - step_q1_closed_form(x, y)).norm() <= 1e-12);
    }
}

#[test]
fn hermiticity_classifies_pairs() {
    let k = particular_kernel_q1(&PiecewisePotential::step());
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for i in 0..60u64 {
        let violated = match (i % 4) as usize {
            0 => None,
            j => Some(PairConstraint::ALL[j - 1]),
        };
        let hom = homogeneous_pair(violated, &mut rng);
        let defect = hermiticity_defect(&unchecked_sum(&k, &hom), 200, i).unwrap();
        assert_eq!(
            defect <= 1e-10,
            violated.is_none(),
            "{violated:?}: {defect:e}"
        );
        assert_eq!(
            general_kernel(&k, &hom, &Tolerance::default()).is_ok(),
            violated.is_none()
        );
    }
}

#[test]
fn jump_defect_of_gauged_kernel_is_first_order_in_delta() {
    // The particular kernel meets the jump condition exactly; an added
    // smooth pair perturbs it by ≈ 2δ·(f′(0) + …), linear in δ.
    let v = PiecewisePotential::step();
    let k = particular_kernel_q1(&v);
    let xs: Vec<f64> = (0..201).map(|i| -2.0 + 0.02 * i as f64).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let hom = homogeneous_pair(None, &mut rng);
    let gk = general_kernel(&k, &hom, &Tolerance::default()).unwrap();
    let coarse = jump_condition_defect(&gk, &v, 1e-2, &xs).unwrap();
    let fine = jump_condition_defect(&gk, &v, 1e-3, &xs).unwrap();
    assert!(
        (8.0..=12.0).contains(&(coarse / fine)),
        "{coarse:e} / {fine:e}"
    );
    assert!(jump_condition_defect(&k, &v, 1e-3, &xs).unwrap() <= 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn valid_pairs_keep_the_kernel_hermitian(seed in any::<u64>()) {
        let k = particular_kernel_q1(&PiecewisePotential::step());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let hom = homogeneous_pair(None, &mut rng);
        let gk = general_kernel(&k, &hom, &Tolerance::default()).unwrap();
        prop_assert!(hermiticity_defect(&gk, 200, seed).unwrap() <= 1e-10);
    }

    #[test]
    fn antiderivative_is_continuous(
        cuts in proptest::collection::btree_set(-40i32..40, 1..6),
        heights in proptest::collection::vec(-2.0f64..2.0, 6),
        probe in -5.0f64..5.0,
    ) {
        let breakpoints: Vec<f64> = cuts.iter().map(|&c| c as f64 / 10.0).collect();
        let mut values = vec![0.0];
        values.extend(heights.iter().take(breakpoints.len() - 1));
        values.push(0.0);
        let v = PiecewisePotential::new(breakpoints, values).unwrap();
        let anti = phq_core::potential_antiderivative(&v);
        let h = 1e-9;
        prop_assert!((anti.eval(probe + h) - anti.eval(probe - h)).abs() <= 1e-8);
        prop_assert!(anti.eval(0.0) == 0.0);
    }
}
