use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wordseries_core::random::{random_character, random_infinitesimal, random_map};
use wordseries_core::{CoeffMap, GaussianRational as Q};

fn seeds() -> impl Strategy<Value = u64> {
    any::<u64>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn convolution_is_associative(seed in seeds()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: CoeffMap<Q> = random_map(2, 4, &mut rng).unwrap();
        let b: CoeffMap<Q> = random_map(2, 4, &mut rng).unwrap();
        let c: CoeffMap<Q> = random_map(2, 4, &mut rng).unwrap();
        let left = a.convolve(&b).unwrap().convolve(&c).unwrap();
        let right = a.convolve(&b.convolve(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn characters_form_a_group(seed in seeds()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: CoeffMap<Q> = random_character(2, 4, &mut rng).unwrap();
        let b: CoeffMap<Q> = random_character(2, 4, &mut rng).unwrap();
        prop_assert!(a.convolve(&b).unwrap().is_character());
        let inv = a.inverse().unwrap();
        prop_assert!(inv.is_character());
        prop_assert_eq!(a.convolve(&inv).unwrap(), CoeffMap::unit(2, 4).unwrap());
    }

    #[test]
    fn infinitesimals_form_a_lie_algebra(seed in seeds()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: CoeffMap<Q> = random_infinitesimal(2, 4, &mut rng).unwrap();
        let b: CoeffMap<Q> = random_infinitesimal(2, 4, &mut rng).unwrap();
        let c: CoeffMap<Q> = random_infinitesimal(2, 4, &mut rng).unwrap();
        prop_assert!(a.bracket(&b).unwrap().is_infinitesimal());
        let jacobi = a.bracket(&b.bracket(&c).unwrap()).unwrap()
            .add(&b.bracket(&c.bracket(&a).unwrap()).unwrap()).unwrap()
            .add(&c.bracket(&a.bracket(&b).unwrap()).unwrap()).unwrap();
        prop_assert!(jacobi.is_zero());
    }

    #[test]
    fn exp_and_log_are_inverse(seed in seeds()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b: CoeffMap<Q> = random_infinitesimal(2, 4, &mut rng).unwrap();
        let g = b.exp_star().unwrap();
        prop_assert!(g.is_character());
        prop_assert_eq!(g.log_star().unwrap(), b);
    }

    #[test]
    fn conjugation_preserves_infinitesimals(seed in seeds()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b: CoeffMap<Q> = random_infinitesimal(2, 3, &mut rng).unwrap();
        let x: CoeffMap<Q> = random_character(2, 3, &mut rng).unwrap();
        let conj = x.inverse().unwrap().convolve(&b).unwrap().convolve(&x).unwrap();
        prop_assert!(conj.is_infinitesimal());
    }
}
