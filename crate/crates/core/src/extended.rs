//! Extended coefficients `(v, delta)`: the diagonal operators `Xi_v` and
//! `xi_v`, the group product, the Lie bracket, and the exponential and
//! logarithm of the extended group.

use num_complex::Complex64;

use crate::coeff::CoeffMap;
use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use crate::freq::{FreqTable, FreqVector};
use crate::scalar::Scalar;
use crate::word::WordSpace;

/// Guard band for the divisors `(e^nu - 1) / nu` of the logarithm.
pub const LOG_DIVISOR_GUARD: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    /// `delta` is a character: element of the extended group.
    Group,
    /// `delta` is an infinitesimal character: element of the extended algebra.
    Algebra,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtCoeff<S> {
    pub v: FreqVector,
    pub delta: CoeffMap<S>,
    pub class: Membership,
}

impl<S: Scalar> ExtCoeff<S> {
    pub fn group(v: FreqVector, delta: CoeffMap<S>) -> Result<Self> {
        if !delta.is_character() {
            return Err(Error::Precondition("group element requires a character".into()));
        }
        Ok(ExtCoeff { v, delta, class: Membership::Group })
    }

    pub fn algebra(v: FreqVector, delta: CoeffMap<S>) -> Result<Self> {
        if !delta.is_infinitesimal() {
            return Err(Error::Precondition("algebra element requires an infinitesimal character".into()));
        }
        Ok(ExtCoeff { v, delta, class: Membership::Algebra })
    }

    pub fn identity(d: usize, alphabet: usize, order: usize) -> Result<Self> {
        Ok(ExtCoeff { v: FreqVector::zero(d), delta: CoeffMap::unit(alphabet, order)?, class: Membership::Group })
    }
}

impl FreqTable {
    fn check_space<S: Scalar>(&self, d: &CoeffMap<S>) -> Result<WordSpace> {
        if d.alphabet() != self.alphabet() {
            return Err(Error::AlphabetMismatch { left: d.alphabet(), right: self.alphabet() });
        }
        Ok(d.space())
    }

    /// `(Xi_v d)_w = exp(nu_w^v) d_w`. In exact mode this succeeds only when
    /// every word carrying a nonzero coefficient is resonant.
    pub fn big_xi<S: Scalar>(&self, v: &FreqVector, d: &CoeffMap<S>) -> Result<CoeffMap<S>> {
        let space = self.check_space(d)?;
        let freqs = self.nu_all(v, &space)?;
        let mut values = Vec::with_capacity(space.len());
        for (i, (c, f)) in d.values().iter().zip(&freqs).enumerate() {
            if f.is_zero || c.is_zero() {
                values.push(c.clone());
                continue;
            }
            let e = S::from_c64(f.value.exp())
                .ok_or_else(|| Error::InexactExponential { word: space.word_at(i).to_string() })?;
            values.push(e * c.clone());
        }
        CoeffMap::from_values(space.alphabet(), space.order(), values)
    }

    /// Float evaluation of `Xi_v d`, available in both modes.
    pub fn big_xi_numeric<S: Scalar>(&self, v: &FreqVector, d: &CoeffMap<S>) -> Result<CoeffMap<Complex64>> {
        let space = self.check_space(d)?;
        let freqs = self.nu_all(v, &space)?;
        CoeffMap::from_values(
            space.alphabet(),
            space.order(),
            d.values()
                .iter()
                .zip(&freqs)
                .map(|(c, f)| if f.is_zero { c.to_c64() } else { f.value.exp() * c.to_c64() })
                .collect(),
        )
    }

    /// `(xi_v d)_w = nu_w^v d_w`.
    pub fn small_xi<S: Scalar>(&self, v: &FreqVector, d: &CoeffMap<S>) -> Result<CoeffMap<S>> {
        let space = self.check_space(d)?;
        let nus: Vec<S> = self.nu_scalars(v, &space)?;
        CoeffMap::from_values(
            space.alphabet(),
            space.order(),
            d.values().iter().zip(nus).map(|(c, nu)| nu * c.clone()).collect(),
        )
    }

    /// `(u, g) ⋆̄ (v, d) = (v + d_∅ u, g ⋆ Xi_u d)`.
    pub fn ext_product<S: Scalar>(&self, a: &ExtCoeff<S>, b: &ExtCoeff<S>) -> Result<ExtCoeff<S>> {
        let v = b.v.add(&a.v.scale(b.delta.empty_word_value()))?;
        let delta = a.delta.convolve(&self.big_xi(&a.v, &b.delta)?)?;
        Ok(ExtCoeff { v, delta, class: b.class })
    }

    /// Inverse in the extended group: `(u, g)^{-1} = (-u, Xi_{-u} g^{-1})`.
    pub fn ext_inverse<S: Scalar>(&self, a: &ExtCoeff<S>) -> Result<ExtCoeff<S>> {
        let minus = a.v.scale(&-S::one());
        let delta = self.big_xi(&minus, &a.delta.inverse()?)?;
        Ok(ExtCoeff { v: minus, delta, class: Membership::Group })
    }

    /// `[(v, b), (u, e)] = (0, xi_v e - xi_u b + [b, e])`.
    pub fn ext_bracket<S: Scalar>(&self, a: &ExtCoeff<S>, b: &ExtCoeff<S>) -> Result<ExtCoeff<S>> {
        let delta = self
            .small_xi(&a.v, &b.delta)?
            .sub(&self.small_xi(&b.v, &a.delta)?)?
            .add(&a.delta.bracket(&b.delta)?)?;
        Ok(ExtCoeff { v: FreqVector::zero(self.d()), delta, class: Membership::Algebra })
    }

    /// Solves `alpha' = alpha ⋆ Xi_{tv} beta`, `alpha(0) = 1`, word by word
    /// with exponential-polynomial coefficients.
    pub fn ext_exp_curve<S: Scalar>(&self, a: &ExtCoeff<S>) -> Result<ExpCurve<S>> {
        let space = self.check_space(&a.delta)?;
        let nus: Vec<S> = self.nu_scalars(&a.v, &space)?;
        let beta = a.delta.values();
        let mut alpha: Vec<ExpPoly<S>> = vec![ExpPoly::zero(); space.len()];
        alpha[0] = ExpPoly::one();
        for n in 1..=space.order() {
            for rank in 0..space.level_size(n) {
                let idx = space.index_of_rank(n, rank);
                alpha[idx] = integrand(&space, n, rank, 0, &alpha, beta, &nus).integrate();
            }
        }
        Ok(ExpCurve { v: a.v.clone(), space, alpha })
    }

    /// `exp(v, b) = (v, alpha(1))`.
    pub fn ext_exp<S: Scalar>(&self, a: &ExtCoeff<S>) -> Result<ExtCoeff<S>> {
        let curve = self.ext_exp_curve(a)?;
        Ok(ExtCoeff { v: a.v.clone(), delta: curve.at_one()?, class: Membership::Group })
    }

    /// Logarithm in the extended group: the unique `b` with
    /// `exp(v, b) = (v, g)`, solved from `g_w = I(nu_w) b_w + known` where
    /// `I(nu) = (e^nu - 1) / nu`.
    pub fn ext_log<S: Scalar>(&self, a: &ExtCoeff<S>) -> Result<ExtCoeff<S>> {
        let space = self.check_space(&a.delta)?;
        if !(a.delta.empty_word_value().clone() - S::one()).is_negligible() {
            return Err(Error::Precondition("logarithm requires a character with unit empty-word value".into()));
        }
        let freqs = self.nu_all(&a.v, &space)?;
        let nus: Vec<S> = self.nu_scalars(&a.v, &space)?;
        let gamma = a.delta.values();
        let mut beta = vec![S::zero(); space.len()];
        let mut alpha: Vec<ExpPoly<S>> = vec![ExpPoly::zero(); space.len()];
        alpha[0] = ExpPoly::one();
        for n in 1..=space.order() {
            for rank in 0..space.level_size(n) {
                let idx = space.index_of_rank(n, rank);
                let word = || space.word_at(idx).to_string();
                let known = integrand(&space, n, rank, 1, &alpha, &beta, &nus).integrate();
                let known_one = known.eval_at_one().ok_or_else(|| Error::InexactExponential { word: word() })?;
                let basis = ExpPoly::exp(nus[idx].clone()).integrate();
                let divisor_f = if freqs[idx].is_zero {
                    Complex64::new(1.0, 0.0)
                } else {
                    (freqs[idx].value.exp() - 1.0) / freqs[idx].value
                };
                if divisor_f.norm() <= LOG_DIVISOR_GUARD {
                    return Err(Error::SmallDivisor { word: word(), magnitude: divisor_f.norm() });
                }
                let divisor = basis.eval_at_one().ok_or_else(|| Error::InexactExponential { word: word() })?;
                let b = (gamma[idx].clone() - known_one) / divisor;
                alpha[idx] = known.add(&basis.scale(&b));
                beta[idx] = b;
            }
        }
        let delta = CoeffMap::from_values(space.alphabet(), space.order(), beta)?;
        Ok(ExtCoeff { v: a.v.clone(), delta, class: Membership::Algebra })
    }

    /// `B = kappa ⋆ Xi_u beta ⋆ kappa^{-1} - (xi_v kappa) ⋆ kappa^{-1}`.
    pub fn change_of_variables<S: Scalar>(
        &self,
        kappa: &CoeffMap<S>,
        u: &FreqVector,
        v: &FreqVector,
        beta: &CoeffMap<S>,
    ) -> Result<CoeffMap<S>> {
        let inv = kappa.inverse()?;
        let conj = kappa.convolve(&self.big_xi(u, beta)?)?.convolve(&inv)?;
        conj.sub(&self.small_xi(v, kappa)?.convolve(&inv)?)
    }
}

/// `sum_{w = w1 w2, |w1| >= min_prefix, w2 nonempty} alpha_{w1}(t) b_{w2} e^{t nu_{w2}}`
/// for the word of length `n` and rank `rank`.
fn integrand<S: Scalar>(
    space: &WordSpace,
    n: usize,
    rank: usize,
    min_prefix: usize,
    alpha: &[ExpPoly<S>],
    beta: &[S],
    nus: &[S],
) -> ExpPoly<S> {
    let mut acc = ExpPoly::zero();
    for j in min_prefix..n {
        let (p, s) = space.split_rank(n, rank, j);
        let right = space.index_of_rank(n - j, s);
        if beta[right].is_zero() {
            continue;
        }
        let left = &alpha[space.index_of_rank(j, p)];
        if left.is_zero() {
            continue;
        }
        acc = acc.add(&left.shift_rate(&nus[right]).scale(&beta[right]));
    }
    acc
}

/// The curve `t -> alpha(t)` of an extended exponential, one exponential
/// polynomial per word.
#[derive(Clone, Debug)]
pub struct ExpCurve<S> {
    pub v: FreqVector,
    space: WordSpace,
    alpha: Vec<ExpPoly<S>>,
}

impl<S: Scalar> ExpCurve<S> {
    pub fn space(&self) -> WordSpace {
        self.space
    }

    pub fn coefficient(&self, index: usize) -> &ExpPoly<S> {
        &self.alpha[index]
    }

    pub fn at(&self, t: f64) -> CoeffMap<Complex64> {
        let values = self.alpha.iter().map(|p| p.eval_real(t)).collect();
        CoeffMap::from_values(self.space.alphabet(), self.space.order(), values).expect("space matches")
    }

    /// `alpha(1)` in the scalar mode; in exact mode only when no
    /// nonzero exponential rate survives.
    pub fn at_one(&self) -> Result<CoeffMap<S>> {
        let mut values = Vec::with_capacity(self.alpha.len());
        for (i, p) in self.alpha.iter().enumerate() {
            values.push(
                p.eval_at_one()
                    .ok_or_else(|| Error::InexactExponential { word: self.space.word_at(i).to_string() })?,
            );
        }
        CoeffMap::from_values(self.space.alphabet(), self.space.order(), values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_character, random_infinitesimal, random_map};
    use crate::scalar::{gaussian, GaussianRational};
    use crate::word::Word;
    use num_traits::Zero;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type Q = GaussianRational;

    fn table() -> FreqTable {
        FreqTable::imaginary_from_ints(2, &[vec![0, 0], vec![1, 2], vec![-1, -2]]).unwrap()
    }

    fn float_v() -> FreqVector {
        FreqVector::Explicit(vec![gaussian(1, 0), gaussian(-1, 0)])
    }

    #[test]
    fn small_xi_kills_resonant_maps() {
        let t = table();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d: CoeffMap<Q> = random_map(3, 3, &mut rng).unwrap();
        let v = FreqVector::from_ints(&[2, -1]);
        let resonant = d.restrict(|w| t.nu_word(&v, w).unwrap().is_zero);
        assert!(t.small_xi(&v, &resonant).unwrap().is_zero());
        assert_eq!(t.big_xi(&v, &resonant).unwrap(), resonant);
    }

    #[test]
    fn big_xi_is_a_homomorphism() {
        let t = table();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v = float_v();
        for _ in 0..5 {
            let g: CoeffMap<Complex64> = random_character(3, 4, &mut rng).unwrap();
            let d: CoeffMap<Complex64> = random_character(3, 4, &mut rng).unwrap();
            let lhs = t.big_xi(&v, &g.convolve(&d).unwrap()).unwrap();
            let rhs = t.big_xi(&v, &g).unwrap().convolve(&t.big_xi(&v, &d).unwrap()).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }
    }

    #[test]
    fn small_xi_is_a_derivation() {
        let t = table();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let v = FreqVector::from_ints(&[3, 1]);
        let a: CoeffMap<Q> = random_map(3, 4, &mut rng).unwrap();
        let b: CoeffMap<Q> = random_map(3, 4, &mut rng).unwrap();
        let lhs = t.small_xi(&v, &a.convolve(&b).unwrap()).unwrap();
        let rhs = t
            .small_xi(&v, &a)
            .unwrap()
            .convolve(&b)
            .unwrap()
            .add(&a.convolve(&t.small_xi(&v, &b).unwrap()).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn exact_big_xi_rejects_nonresonant_support() {
        let t = table();
        let d = CoeffMap::<Q>::monomial(3, 2, &Word::letter(1), gaussian(1, 0)).unwrap();
        assert!(matches!(
            t.big_xi(&FreqVector::from_ints(&[1, 0]), &d),
            Err(Error::InexactExponential { .. })
        ));
    }

    #[test]
    fn product_unit_and_mixed_form() {
        let t = table();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g: CoeffMap<Complex64> = random_character(3, 3, &mut rng).unwrap();
        let x = ExtCoeff::group(float_v(), g.clone()).unwrap();
        let unit = ExtCoeff::identity(2, 3, 3).unwrap();
        let left = t.ext_product(&unit, &x).unwrap();
        assert_eq!(left.delta, x.delta);
        let u = ExtCoeff { v: float_v(), delta: CoeffMap::unit(3, 3).unwrap(), class: Membership::Group };
        let z = ExtCoeff { v: FreqVector::zero(2), delta: g.clone(), class: Membership::Group };
        let mixed = t.ext_product(&u, &z).unwrap();
        assert_eq!(mixed.v, float_v());
        assert!(mixed.delta.max_abs_diff(&t.big_xi(&float_v(), &g).unwrap()) < 1e-15);
    }

    #[test]
    fn group_inverse() {
        let t = table();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let g: CoeffMap<Complex64> = random_character(3, 3, &mut rng).unwrap();
        let x = ExtCoeff::group(float_v(), g).unwrap();
        let prod = t.ext_product(&x, &t.ext_inverse(&x).unwrap()).unwrap();
        assert!(prod.v.is_zero());
        assert!(prod.delta.max_abs_diff(&CoeffMap::unit(3, 3).unwrap()) < 1e-12);
    }

    #[test]
    fn bracket_with_pure_frequency() {
        let t = table();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let v = FreqVector::from_ints(&[1, 1]);
        let e: CoeffMap<Q> = random_infinitesimal(3, 3, &mut rng).unwrap();
        let a = ExtCoeff { v: v.clone(), delta: CoeffMap::zero(3, 3).unwrap(), class: Membership::Algebra };
        let b = ExtCoeff { v: FreqVector::zero(2), delta: e.clone(), class: Membership::Algebra };
        assert_eq!(t.ext_bracket(&a, &b).unwrap().delta, t.small_xi(&v, &e).unwrap());
    }

    #[test]
    fn exp_with_zero_frequency_is_plain_exp() {
        let t = table();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let b: CoeffMap<Q> = random_infinitesimal(3, 4, &mut rng).unwrap();
        let a = ExtCoeff { v: FreqVector::zero(2), delta: b.clone(), class: Membership::Algebra };
        assert_eq!(t.ext_exp(&a).unwrap().delta, b.exp_star().unwrap());
    }

    #[test]
    fn exp_single_letter() {
        let t = FreqTable::new(1, vec![vec![gaussian(3, 1)]]).unwrap();
        let b = CoeffMap::<Complex64>::letters_indicator(1, 1).unwrap();
        let a = ExtCoeff { v: FreqVector::from_ints(&[1]), delta: b, class: Membership::Algebra };
        let got = t.ext_exp(&a).unwrap().delta[&Word::letter(0)];
        let nu = Complex64::new(3.0, 1.0);
        assert!((got - (nu.exp() - 1.0) / nu).norm() < 1e-14);
    }

    #[test]
    fn log_of_identity_is_zero() {
        let t = table();
        let a = ExtCoeff { v: float_v(), delta: CoeffMap::<Complex64>::unit(3, 3).unwrap(), class: Membership::Group };
        assert!(t.ext_log(&a).unwrap().delta.is_zero());
    }

    #[test]
    fn log_detects_two_pi_i() {
        let t = FreqTable::new(1, vec![vec![gaussian(0, 1)], vec![Q::zero()]]).unwrap();
        let v = FreqVector::Generic(vec![Complex64::new(2.0 * std::f64::consts::PI, 0.0)]);
        let g = CoeffMap::<Complex64>::unit(2, 2).unwrap();
        let a = ExtCoeff { v, delta: g, class: Membership::Group };
        match t.ext_log(&a) {
            Err(Error::SmallDivisor { word, magnitude }) => {
                assert_eq!(word, "(0)");
                assert!(magnitude < 1e-8);
            }
            other => panic!("expected small divisor, got {other:?}"),
        }
    }

    #[test]
    fn change_of_variables_trivial_kappa() {
        let t = table();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let b: CoeffMap<Complex64> = random_infinitesimal(3, 3, &mut rng).unwrap();
        let one = CoeffMap::unit(3, 3).unwrap();
        let got = t.change_of_variables(&one, &float_v(), &FreqVector::from_ints(&[2, 2]), &b).unwrap();
        assert!(got.max_abs_diff(&t.big_xi(&float_v(), &b).unwrap()) < 1e-15);
    }
}
