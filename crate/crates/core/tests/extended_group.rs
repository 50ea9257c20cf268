use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wordseries_core::random::{random_character, random_infinitesimal};
use wordseries_core::scalar::gaussian_ratio;
use wordseries_core::{CoeffMap, Error, ExtCoeff, FreqTable, FreqVector, GaussianRational as Q, Membership};

fn toy() -> FreqTable {
    FreqTable::imaginary_from_ints(2, &[vec![0, 0], vec![1, 2], vec![-1, -2]]).unwrap()
}

fn vec2(a: (i64, i64), b: (i64, i64)) -> FreqVector {
    FreqVector::Explicit(vec![gaussian_ratio(a.0, a.1), gaussian_ratio(b.0, b.1)])
}

#[test]
fn xi_composes_additively_and_commutes_with_exp() {
    let t = toy();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let d: CoeffMap<Complex64> = random_character(3, 4, &mut rng).unwrap();
    let (u, v) = (vec2((1, 3), (1, 2)), vec2((-2, 5), (3, 7)));
    let lhs = t.big_xi(&v, &t.big_xi(&u, &d).unwrap()).unwrap();
    let rhs = t.big_xi(&u.add(&v).unwrap(), &d).unwrap();
    assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    let b: CoeffMap<Complex64> = random_infinitesimal(3, 4, &mut rng).unwrap();
    let a = t.big_xi(&v, &b).unwrap().exp_star().unwrap();
    let c = t.big_xi(&v, &b.exp_star().unwrap()).unwrap();
    assert!(a.max_abs_diff(&c) < 1e-12);
    assert!(t.big_xi(&v, &d).unwrap().is_character());
    assert!(t.big_xi(&v, &b).unwrap().is_infinitesimal());
}

#[test]
fn xi_is_a_homomorphism_and_small_xi_a_derivation() {
    let t = toy();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let v = vec2((1, 3), (1, 2));
    let g: CoeffMap<Complex64> = random_character(3, 4, &mut rng).unwrap();
    let h: CoeffMap<Complex64> = random_character(3, 4, &mut rng).unwrap();
    let lhs = t.big_xi(&v, &g.convolve(&h).unwrap()).unwrap();
    let rhs = t.big_xi(&v, &g).unwrap().convolve(&t.big_xi(&v, &h).unwrap()).unwrap();
    assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    let x: CoeffMap<Q> = random_character(3, 4, &mut rng).unwrap();
    let y: CoeffMap<Q> = random_character(3, 4, &mut rng).unwrap();
    let lhs = t.small_xi(&v, &x.convolve(&y).unwrap()).unwrap();
    let rhs = t.small_xi(&v, &x).unwrap().convolve(&y).unwrap().add(&x.convolve(&t.small_xi(&v, &y).unwrap()).unwrap()).unwrap();
    assert_eq!(lhs, rhs);
}

#[test]
fn extended_product_is_associative_with_inverses() {
    let t = toy();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut el = |a, b| ExtCoeff::group(vec2(a, b), random_character::<Complex64, _>(3, 3, &mut rng).unwrap()).unwrap();
    let (x, y, z) = (el((1, 2), (1, 3)), el((-1, 4), (2, 1)), el((3, 5), (-1, 2)));
    let left = t.ext_product(&t.ext_product(&x, &y).unwrap(), &z).unwrap();
    let right = t.ext_product(&x, &t.ext_product(&y, &z).unwrap()).unwrap();
    assert!(left.delta.max_abs_diff(&right.delta) < 1e-12);
    assert_eq!(left.v.numeric(), right.v.numeric());
    let inv = t.ext_inverse(&x).unwrap();
    let unit = t.ext_product(&x, &inv).unwrap();
    assert!(unit.v.is_zero());
    assert!(unit.delta.max_abs_diff(&CoeffMap::unit(3, 3).unwrap()) < 1e-12);
}

#[test]
fn extended_bracket_satisfies_jacobi() {
    let t = toy();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut el = |a, b| ExtCoeff::algebra(vec2(a, b), random_infinitesimal::<Q, _>(3, 4, &mut rng).unwrap()).unwrap();
    let (x, y, z) = (el((1, 2), (1, 3)), el((-1, 4), (2, 1)), el((3, 5), (-1, 2)));
    let br = |a: &ExtCoeff<Q>, b: &ExtCoeff<Q>| t.ext_bracket(a, b).unwrap();
    let j = br(&x, &br(&y, &z)).delta.add(&br(&y, &br(&z, &x)).delta).unwrap().add(&br(&z, &br(&x, &y)).delta).unwrap();
    assert!(j.is_zero());
    let anti = br(&x, &y).delta.add(&br(&y, &x).delta).unwrap();
    assert!(anti.is_zero());
}

#[test]
fn extended_exp_and_log_roundtrip() {
    let t = toy();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let beta: CoeffMap<Complex64> = random_infinitesimal(3, 4, &mut rng).unwrap();
        let a = ExtCoeff { v: vec2((1, 3), (1, 5)), delta: beta.clone(), class: Membership::Algebra };
        let g = t.ext_exp(&a).unwrap();
        assert!(g.delta.is_character());
        let back = t.ext_log(&g).unwrap();
        assert!(back.delta.max_abs_diff(&beta) < 1e-12);
    }
}

#[test]
fn log_detects_multiplicative_resonance() {
    let t = toy();
    let v = FreqVector::Generic(vec![Complex64::new(2.0 * std::f64::consts::PI, 0.0), Complex64::new(0.0, 0.0)]);
    let g = ExtCoeff::group(v, CoeffMap::<Complex64>::unit(3, 2).unwrap()).unwrap();
    let mut shifted = g.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    shifted.delta = random_character(3, 2, &mut rng).unwrap();
    assert!(matches!(t.ext_log(&shifted), Err(Error::SmallDivisor { .. })));
}
