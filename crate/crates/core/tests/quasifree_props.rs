use proptest::prelude::*;
use qfm_core::blocklin::{block_diag, max_norm, random, symmetrize, PartitionedMatrix};
use qfm_core::quasifree::{cocycle_flow, entropy_closed_form, QuasiFreeState};
use qfm_core::CMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn restriction_entropies_are_subadditive() {
    for seed in 0..200 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, q) = (1 + seed as usize % 3, 1 + (seed as usize / 3) % 3);
        let a = PartitionedMatrix::new(vec![p, q], random::wishart(p + q, 1 + seed as usize % 5, &mut rng)).unwrap();
        let s = QuasiFreeState::new(a).unwrap();
        let parts = s.restrict(&[0]).unwrap().entropy() + s.restrict(&[1]).unwrap().entropy();
        assert!(s.entropy() <= parts + 1e-9, "seed {seed}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn char_value_factorizes(seed in any::<u64>(), p in 1usize..4, q in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a1, a2) = (random::wishart(p, p + 1, &mut rng), random::wishart(q, q + 1, &mut rng));
        let (f1, f2) = (random::vector(p, &mut rng), random::vector(q, &mut rng));
        let joint = QuasiFreeState::from_matrix(block_diag(&[&a1, &a2])).unwrap();
        let f = CMatrix::from_iterator(p + q, 1, f1.iter().chain(f2.iter()).copied()).column(0).into_owned();
        let lhs = joint.char_value(&f).unwrap();
        let rhs = QuasiFreeState::from_matrix(a1).unwrap().char_value(&f1).unwrap()
            * QuasiFreeState::from_matrix(a2).unwrap().char_value(&f2).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-14 * lhs.max(rhs));
    }

    #[test]
    fn entropy_is_unitarily_invariant(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random::wishart(n, n + 2, &mut rng);
        let u = random::unitary(n, &mut rng);
        let s1 = entropy_closed_form(&QuasiFreeState::from_matrix(a.clone()).unwrap());
        let s2 = entropy_closed_form(&QuasiFreeState::from_matrix(symmetrize(&(u.adjoint() * a * u))).unwrap());
        prop_assert!((s1 - s2).abs() < 1e-10);
    }

    #[test]
    fn cocycle_inverse_pairing(seed in any::<u64>(), n in 1usize..5, t in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift = CMatrix::identity(n, n).scale(0.05);
        let a = QuasiFreeState::from_matrix(random::wishart(n, n + 1, &mut rng) + &shift).unwrap();
        let b = QuasiFreeState::from_matrix(random::wishart(n, n + 1, &mut rng) + &shift).unwrap();
        let ab = cocycle_flow(&a, &b, t).unwrap();
        let ba = cocycle_flow(&b, &a, t).unwrap();
        prop_assert!(max_norm(&(ab.one_particle * ba.one_particle - CMatrix::identity(n, n))) < 1e-10);
    }
}
