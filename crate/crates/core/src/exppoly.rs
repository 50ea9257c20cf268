//! Exponential polynomials `sum c t^k exp(mu t)`, closed under products and
//! integration from zero. They carry the iterated-integral coefficients of
//! word series whose letter weights are exponentials.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;

use crate::scalar::Scalar;
use crate::word::Word;

#[derive(Clone, Debug, PartialEq)]
pub struct Term<S> {
    pub coef: S,
    pub power: u32,
    pub rate: S,
}

/// Canonical form: equal `(power, rate)` merged, zero coefficients dropped,
/// terms sorted by `(rate, power)`. In exact mode rates merge only when
/// exactly equal; float rates merge only when bitwise equal.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpPoly<S> {
    terms: Vec<Term<S>>,
}

impl<S: Scalar> Default for ExpPoly<S> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<S: Scalar> ExpPoly<S> {
    pub fn zero() -> Self {
        ExpPoly { terms: Vec::new() }
    }

    pub fn constant(c: S) -> Self {
        Self::term(c, 0, S::zero())
    }

    pub fn one() -> Self {
        Self::constant(S::one())
    }

    /// `exp(rate t)`.
    pub fn exp(rate: S) -> Self {
        Self::term(S::one(), 0, rate)
    }

    pub fn term(coef: S, power: u32, rate: S) -> Self {
        Self::from_terms(vec![Term { coef, power, rate }])
    }

    pub fn from_terms(mut terms: Vec<Term<S>>) -> Self {
        terms.sort_by(|a, b| cmp_key(a, b));
        let mut out: Vec<Term<S>> = Vec::with_capacity(terms.len());
        for t in terms {
            match out.last_mut() {
                Some(last) if cmp_key(last, &t) == Ordering::Equal => {
                    last.coef = last.coef.clone() + t.coef;
                }
                _ => out.push(t),
            }
        }
        out.retain(|t| !t.coef.is_zero());
        ExpPoly { terms: out }
    }

    pub fn terms(&self) -> &[Term<S>] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_terms(self.terms.iter().chain(&other.terms).cloned().collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-S::one()))
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| Term { coef: t.coef.clone() * c.clone(), power: t.power, rate: t.rate.clone() })
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(Term {
                    coef: a.coef.clone() * b.coef.clone(),
                    power: a.power + b.power,
                    rate: a.rate.clone() + b.rate.clone(),
                });
            }
        }
        Self::from_terms(terms)
    }

    /// Multiplies by `exp(rate t)`.
    pub fn shift_rate(&self, rate: &S) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| Term { coef: t.coef.clone(), power: t.power, rate: t.rate.clone() + rate.clone() })
                .collect(),
        )
    }

    pub fn derivative(&self) -> Self {
        let mut terms = Vec::with_capacity(2 * self.terms.len());
        for t in &self.terms {
            if t.power > 0 {
                terms.push(Term {
                    coef: t.coef.clone() * S::from_i64(t.power as i64),
                    power: t.power - 1,
                    rate: t.rate.clone(),
                });
            }
            if !t.rate.is_zero() {
                terms.push(Term { coef: t.coef.clone() * t.rate.clone(), power: t.power, rate: t.rate.clone() });
            }
        }
        Self::from_terms(terms)
    }

    /// The antiderivative vanishing at `t = 0`.
    pub fn integrate(&self) -> Self {
        let mut terms = Vec::new();
        let mut constant = S::zero();
        for t in &self.terms {
            if t.rate.is_zero() {
                let k = t.power + 1;
                terms.push(Term { coef: t.coef.clone() / S::from_i64(k as i64), power: k, rate: S::zero() });
                continue;
            }
            // c t^k e^{mu t}: antiderivative e^{mu t} sum_j a_j t^j with
            // a_k = c / mu and a_{j-1} = -j a_j / mu.
            let inv_rate = S::one() / t.rate.clone();
            let mut a = t.coef.clone() * inv_rate.clone();
            let mut j = t.power;
            loop {
                terms.push(Term { coef: a.clone(), power: j, rate: t.rate.clone() });
                if j == 0 {
                    break;
                }
                a = -(a * S::from_i64(j as i64) * inv_rate.clone());
                j -= 1;
            }
            constant = constant - a;
        }
        terms.push(Term { coef: constant, power: 0, rate: S::zero() });
        Self::from_terms(terms)
    }

    pub fn eval(&self, t: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|term| term.coef.to_c64() * t.powu(term.power) * (term.rate.to_c64() * t).exp())
            .sum()
    }

    pub fn eval_real(&self, t: f64) -> Complex64 {
        self.eval(Complex64::new(t, 0.0))
    }

    /// Value at `t = 1` in the scalar mode, if every `exp(rate)` is
    /// representable there.
    pub fn eval_at_one(&self) -> Option<S> {
        self.terms.iter().try_fold(S::zero(), |acc, t| Some(acc + t.coef.clone() * t.rate.try_exp()?))
    }

    /// Exact value at `t = 0`.
    pub fn eval_at_zero(&self) -> S {
        self.terms.iter().filter(|t| t.power == 0).fold(S::zero(), |acc, t| acc + t.coef.clone())
    }

    pub fn to_float(&self) -> ExpPoly<Complex64> {
        ExpPoly::from_terms(
            self.terms
                .iter()
                .map(|t| Term { coef: t.coef.to_c64(), power: t.power, rate: t.rate.to_c64() })
                .collect(),
        )
    }
}

fn cmp_key<S: Scalar>(a: &Term<S>, b: &Term<S>) -> Ordering {
    a.rate.total_cmp(&b.rate).then(a.power.cmp(&b.power))
}

impl<S: Scalar> fmt::Display for ExpPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({})*t^{}*exp(({}) t)", t.coef, t.power, t.rate)?;
        }
        Ok(())
    }
}

/// Iterated integral `int_0^t e^{nu_{ln} t_n} int_0^{t_n} ... e^{nu_{l1} t_1}`
/// with the first letter innermost. `nu` is indexed by letter.
pub fn iterated_integral<S: Scalar>(word: &Word, nu: &[S]) -> ExpPoly<S> {
    let mut acc = ExpPoly::one();
    for l in word.letters() {
        acc = acc.shift_rate(&nu[l.index()]).integrate();
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{gaussian, gaussian_ratio, GaussianRational};
    use num_traits::{One, Zero};

    type Q = GaussianRational;

    #[test]
    fn add_zero_is_identity() {
        let p = ExpPoly::term(gaussian(3, 1), 2, gaussian(1, 0)).add(&ExpPoly::one());
        assert_eq!(p.add(&ExpPoly::zero()), p);
    }

    #[test]
    fn exponents_add_under_product() {
        let a = ExpPoly::exp(gaussian(2, 0));
        let b = ExpPoly::exp(gaussian(0, 3));
        assert_eq!(a.mul(&b), ExpPoly::exp(gaussian(2, 3)));
    }

    #[test]
    fn square_of_t_exp_t_pointwise() {
        let p = ExpPoly::term(Q::one(), 1, Q::one());
        let sq = p.mul(&p);
        assert_eq!(sq, ExpPoly::term(Q::one(), 2, gaussian(2, 0)));
        let t = 0.3f64;
        let direct = (t * t.exp()).powi(2);
        assert!((sq.eval_real(t).re - direct).abs() < 1e-15);
    }

    #[test]
    fn integrate_constant() {
        assert_eq!(ExpPoly::<Q>::one().integrate(), ExpPoly::term(Q::one(), 1, Q::zero()));
    }

    #[test]
    fn integrate_exponential() {
        let mu = gaussian_ratio(3, 2);
        let got = ExpPoly::exp(mu.clone()).integrate();
        let inv = Q::one() / mu.clone();
        let expected = ExpPoly::term(inv.clone(), 0, mu).sub(&ExpPoly::constant(inv));
        assert_eq!(got, expected);
        assert_eq!(got.derivative(), ExpPoly::exp(gaussian_ratio(3, 2)));
    }

    #[test]
    fn integrate_t_exp_t() {
        let got = ExpPoly::term(Q::one(), 1, Q::one()).integrate();
        // (t - 1) e^t + 1
        let expected = ExpPoly::from_terms(vec![
            Term { coef: Q::one(), power: 1, rate: Q::one() },
            Term { coef: -Q::one(), power: 0, rate: Q::one() },
            Term { coef: Q::one(), power: 0, rate: Q::zero() },
        ]);
        assert_eq!(got, expected);
        assert_eq!(got.derivative(), ExpPoly::term(Q::one(), 1, Q::one()));
    }

    #[test]
    fn iterated_integral_of_zero_rates() {
        let nu = vec![Q::zero(), Q::zero()];
        let w = Word::from_letters([0, 1, 1, 0]);
        let got = iterated_integral(&w, &nu);
        assert_eq!(got, ExpPoly::term(gaussian_ratio(1, 24), 4, Q::zero()));
    }

    #[test]
    fn iterated_integral_single_letter() {
        let nu = vec![gaussian(0, 2)];
        let got = iterated_integral(&Word::letter(0), &nu);
        let expected = ExpPoly::exp(gaussian(0, 2)).integrate();
        assert_eq!(got, expected);
        let z = Complex64::new(0.0, 2.0);
        assert!((got.eval_real(1.0) - (z.exp() - 1.0) / z).norm() < 1e-15);
    }

    #[test]
    fn iterated_integral_vanishes_at_zero() {
        let nu = vec![gaussian(1, 0), gaussian(0, -1), Q::zero()];
        for w in [vec![0], vec![0, 1], vec![2, 2, 1], vec![1, 0, 2, 1]] {
            assert!(iterated_integral(&Word::from_letters(w), &nu).eval_at_zero().is_zero());
        }
    }

    #[test]
    fn canonical_display() {
        let p = ExpPoly::term(gaussian(2, 0), 1, gaussian(0, 1));
        assert_eq!(p.to_string(), "(2+0i)*t^1*exp((0+1i) t)");
    }
}
