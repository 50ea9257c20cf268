//! Polynomials in `x_1..x_m` times Fourier modes `exp(i k·theta)` in the
//! trailing angle variables.
//!
//! A term is keyed by one integer per variable: a nonnegative degree for a
//! polynomial variable and a Fourier index for an angle.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Zero};
use wordseries_core::scalar::{format_gaussian, negligible_at};
use wordseries_core::Scalar;

use crate::jet::Jet;

/// `i` as a scalar.
pub fn imag_unit<S: Scalar>() -> S {
    S::from_gaussian(&Complex::new(BigRational::zero(), BigRational::one()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Poly<S> {
    nvars: usize,
    angles: usize,
    terms: BTreeMap<Vec<i32>, S>,
}

impl<S: Scalar> Poly<S> {
    pub fn zero(nvars: usize, angles: usize) -> Self {
        assert!(angles <= nvars, "more angles than variables");
        Poly { nvars, angles, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, angles: usize, c: S) -> Self {
        Self::monomial(nvars, angles, vec![0; nvars], c)
    }

    pub fn monomial(nvars: usize, angles: usize, key: Vec<i32>, c: S) -> Self {
        let mut p = Self::zero(nvars, angles);
        p.add_term(key, c);
        p
    }

    /// The polynomial variable `x_i`.
    pub fn var(nvars: usize, angles: usize, i: usize) -> Self {
        assert!(i < nvars - angles, "x_{i} is an angle");
        let mut key = vec![0; nvars];
        key[i] = 1;
        Self::monomial(nvars, angles, key, S::one())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn angles(&self) -> usize {
        self.angles
    }

    pub fn poly_vars(&self) -> usize {
        self.nvars - self.angles
    }

    pub fn is_angle(&self, i: usize) -> bool {
        i >= self.poly_vars()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i32>, &S)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, key: &[i32]) -> S {
        self.terms.get(key).cloned().unwrap_or_else(S::zero)
    }

    /// Accumulates `c` onto the term `key`, removing exact cancellations.
    pub fn add_term(&mut self, key: Vec<i32>, c: S) {
        assert_eq!(key.len(), self.nvars, "key length");
        assert!(key[..self.poly_vars()].iter().all(|&e| e >= 0), "negative degree");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    fn same_shape(&self, other: &Self) {
        assert!(
            self.nvars == other.nvars && self.angles == other.angles,
            "polynomials over different variables"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_shape(other);
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coefficients(|c| -c.clone())
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars, self.angles);
        }
        let mut out = Self::zero(self.nvars, self.angles);
        for (k, a) in &self.terms {
            out.add_term(k.clone(), a.clone() * c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same_shape(other);
        let mut out = Self::zero(self.nvars, self.angles);
        for (ka, a) in &self.terms {
            for (kb, b) in &other.terms {
                let key = ka.iter().zip(kb).map(|(x, y)| x + y).collect();
                out.add_term(key, a.clone() * b.clone());
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::constant(self.nvars, self.angles, S::one());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Partial derivative in variable `i`; for an angle the mode
    /// `exp(i k theta)` is multiplied by `i k`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars, self.angles);
        let unit = imag_unit::<S>();
        for (k, c) in &self.terms {
            let e = k[i];
            if e == 0 {
                continue;
            }
            if self.is_angle(i) {
                out.add_term(k.clone(), c.clone() * unit.clone() * S::from_i64(e as i64));
            } else {
                let mut key = k.clone();
                key[i] -= 1;
                out.add_term(key, c.clone() * S::from_i64(e as i64));
            }
        }
        out
    }

    pub fn map_coefficients<T: Scalar>(&self, mut f: impl FnMut(&S) -> T) -> Poly<T> {
        let mut out = Poly::zero(self.nvars, self.angles);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), f(c));
        }
        out
    }

    pub fn to_float(&self) -> Poly<Complex64> {
        self.map_coefficients(|c| c.to_c64())
    }

    /// Total degree in the polynomial variables.
    pub fn degree(&self) -> i32 {
        let m = self.poly_vars();
        self.terms.keys().map(|k| k[..m].iter().sum()).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[Complex64]) -> Complex64 {
        assert_eq!(x.len(), self.nvars, "point dimension");
        let m = self.poly_vars();
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in &self.terms {
            let mut t = c.to_c64();
            for (i, &e) in k.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if i < m {
                    t *= x[i].powi(e);
                } else {
                    t *= (Complex64::i() * x[i] * e as f64).exp();
                }
            }
            acc += t;
        }
        acc
    }

    /// Evaluation at a point whose coordinates are series in `eps`.
    pub fn eval_jet(&self, x: &[Jet]) -> Jet {
        assert_eq!(x.len(), self.nvars, "point dimension");
        let order = x.first().map(Jet::order).unwrap_or(0);
        let m = self.poly_vars();
        let mut acc = Jet::zero(order);
        for (k, c) in &self.terms {
            let mut t = Jet::constant(c.to_c64(), order);
            for (i, &e) in k.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let factor = if i < m {
                    x[i].powi(e as u32)
                } else {
                    x[i].scale(Complex64::i() * e as f64).exp()
                };
                t = t.mul(&factor);
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Float-mode zero test relative to `scale`; exact test in exact mode.
    pub fn is_negligible(&self, scale: f64) -> bool {
        self.terms.values().all(|c| negligible_at(c, scale))
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.to_c64().norm()).fold(0.0, f64::max)
    }
}

impl<S: Scalar> fmt::Display for Poly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let m = self.poly_vars();
        for (n, (k, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            match c.to_gaussian() {
                Some(q) if S::MODE == wordseries_core::Mode::Exact => write!(f, "({})", format_gaussian(&q))?,
                _ => write!(f, "({})", c.to_c64())?,
            }
            for (i, &e) in k[..m].iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*x{i}")?,
                    _ => write!(f, "*x{i}^{e}")?,
                }
            }
            if k[m..].iter().any(|&e| e != 0) {
                write!(f, "*e{:?}", &k[m..])?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use wordseries_core::scalar::gaussian;
    use wordseries_core::GaussianRational as Q;

    fn q(n: i64) -> Q {
        gaussian(n, 0)
    }

    #[test]
    fn product_and_derivative() {
        let x = Poly::<Q>::var(2, 0, 0);
        let y = Poly::<Q>::var(2, 0, 1);
        let p = x.mul(&x).mul(&y).add(&y.scale(&q(3)));
        assert_eq!(p.derivative(0), x.mul(&y).scale(&q(2)));
        assert_eq!(p.derivative(1), x.mul(&x).add(&Poly::constant(2, 0, q(3))));
        assert!(p.sub(&p).is_zero());
    }

    #[test]
    fn angle_derivative_multiplies_by_ik() {
        let mode = Poly::<Q>::monomial(2, 1, vec![1, 2], q(1));
        let d = mode.derivative(1);
        assert_eq!(d.coefficient(&[1, 2]), gaussian(0, 2));
        let inverse = Poly::<Q>::monomial(2, 1, vec![0, -2], q(1));
        assert_eq!(mode.mul(&inverse), Poly::var(2, 1, 0));
    }

    #[test]
    fn evaluation_agrees_with_jets() {
        let p = Poly::<Q>::monomial(2, 1, vec![2, 1], gaussian(1, 1)).add(&Poly::constant(2, 1, q(2)));
        let x = [Complex64::new(0.3, -0.1), Complex64::new(0.7, 0.0)];
        let jets: Vec<Jet> = x.iter().map(|&c| Jet::constant(c, 2)).collect();
        let direct = p.eval(&x);
        assert!((p.eval_jet(&jets).value() - direct).norm() < 1e-15);
        let expect = Complex64::new(1.0, 1.0) * x[0] * x[0] * (Complex64::i() * 0.7).exp() + 2.0;
        assert!((direct - expect).norm() < 1e-15);
    }

    #[test]
    fn display_is_readable() {
        let p = Poly::<Q>::monomial(2, 1, vec![1, -1], q(2));
        assert_eq!(p.to_string(), "(2)*x0*e[-1]");
    }
}
