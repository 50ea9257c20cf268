//! Dense truncated coefficient families indexed by words, with the
//! convolution product of the shuffle Hopf algebra and the operations built
//! on it.

use std::ops::Index;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::word::{shuffle, Word, WordSpace};

/// Total map from every word of length `<= order` to a coefficient.
///
/// Values are stored in canonical length-then-lex order, so the first
/// `WordSpace::new(a, m).len()` entries of a map of order `n >= m` are exactly
/// its truncation to order `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffMap<S> {
    space: WordSpace,
    values: Vec<S>,
}

/// Outcome of checking the shuffle relations on every ordered pair of
/// nonempty words with combined length within the truncation order.
#[derive(Clone, Debug, Default)]
pub struct ShuffleReport {
    pub relations_checked: usize,
    pub violations: Vec<(Word, Word)>,
}

impl ShuffleReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl<S: Scalar> CoeffMap<S> {
    pub fn zero(alphabet: usize, order: usize) -> Result<Self> {
        let space = WordSpace::new(alphabet, order)?;
        Ok(CoeffMap { values: vec![S::zero(); space.len()], space })
    }

    /// The unit `1̂`: one at the empty word, zero elsewhere.
    pub fn unit(alphabet: usize, order: usize) -> Result<Self> {
        let mut m = Self::zero(alphabet, order)?;
        m.values[0] = S::one();
        Ok(m)
    }

    pub fn from_fn(alphabet: usize, order: usize, mut f: impl FnMut(&Word) -> S) -> Result<Self> {
        let space = WordSpace::new(alphabet, order)?;
        let values = space.words().map(|w| f(&w)).collect();
        Ok(CoeffMap { space, values })
    }

    pub fn from_values(alphabet: usize, order: usize, values: Vec<S>) -> Result<Self> {
        let space = WordSpace::new(alphabet, order)?;
        if values.len() != space.len() {
            return Err(Error::DimensionMismatch { expected: space.len(), found: values.len() });
        }
        Ok(CoeffMap { space, values })
    }

    /// One on every single-letter word, zero elsewhere: the coefficients of
    /// the unperturbed-plus-letters system `sum_l f_l`.
    pub fn letters_indicator(alphabet: usize, order: usize) -> Result<Self> {
        Self::from_fn(alphabet, order, |w| if w.len() == 1 { S::one() } else { S::zero() })
    }

    /// Coefficient map with value `c` on the single word `w`.
    pub fn monomial(alphabet: usize, order: usize, w: &Word, c: S) -> Result<Self> {
        let mut m = Self::zero(alphabet, order)?;
        m.set(w, c)?;
        Ok(m)
    }

    pub fn space(&self) -> WordSpace {
        self.space
    }

    pub fn alphabet(&self) -> usize {
        self.space.alphabet()
    }

    pub fn order(&self) -> usize {
        self.space.order()
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn get(&self, w: &Word) -> Option<&S> {
        self.space.index(w).ok().map(|i| &self.values[i])
    }

    pub fn set(&mut self, w: &Word, value: S) -> Result<()> {
        let i = self.space.index(w)?;
        self.values[i] = value;
        Ok(())
    }

    pub fn empty_word_value(&self) -> &S {
        &self.values[0]
    }

    pub fn iter(&self) -> impl Iterator<Item = (Word, &S)> + '_ {
        self.space.words().zip(self.values.iter())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order());
        let space = WordSpace::new(self.alphabet(), order).expect("smaller space fits the cap");
        CoeffMap { space, values: self.values[..space.len()].to_vec() }
    }

    pub fn map<T: Scalar>(&self, mut f: impl FnMut(&Word, &S) -> T) -> CoeffMap<T> {
        CoeffMap { space: self.space, values: self.iter().map(|(w, c)| f(&w, c)).collect() }
    }

    pub fn to_float(&self) -> CoeffMap<Complex64> {
        CoeffMap { space: self.space, values: self.values.iter().map(S::to_c64).collect() }
    }

    /// Keeps coefficients on words satisfying `keep`; zeroes the rest.
    pub fn restrict(&self, mut keep: impl FnMut(&Word) -> bool) -> Self {
        self.map(|w, c| if keep(w) { c.clone() } else { S::zero() })
    }

    fn check_alphabet(&self, other: &Self) -> Result<()> {
        if self.alphabet() != other.alphabet() {
            return Err(Error::AlphabetMismatch { left: self.alphabet(), right: other.alphabet() });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Result<Self> {
        self.check_alphabet(other)?;
        let a = self.truncate(other.order());
        let values = a.values.iter().zip(&other.values).map(|(x, y)| f(x, y)).collect();
        Ok(CoeffMap { space: a.space, values })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x.clone() + y.clone())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x.clone() - y.clone())
    }

    pub fn scale(&self, c: &S) -> Self {
        CoeffMap { space: self.space, values: self.values.iter().map(|x| x.clone() * c.clone()).collect() }
    }

    pub fn neg(&self) -> Self {
        CoeffMap { space: self.space, values: self.values.iter().map(|x| -x.clone()).collect() }
    }

    /// Convolution product: `(d ⋆ d2)_w = sum over deconcatenations w = uv of d_u d2_v`.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.check_alphabet(other)?;
        let space = if self.order() <= other.order() { self.space } else { other.space };
        let mut values = Vec::with_capacity(space.len());
        for n in 0..=space.order() {
            for rank in 0..space.level_size(n) {
                let mut acc = S::zero();
                for j in 0..=n {
                    let (p, s) = space.split_rank(n, rank, j);
                    let left = &self.values[space.index_of_rank(j, p)];
                    if left.is_zero() {
                        continue;
                    }
                    let right = &other.values[space.index_of_rank(n - j, s)];
                    if right.is_zero() {
                        continue;
                    }
                    acc = acc + left.clone() * right.clone();
                }
                values.push(acc);
            }
        }
        Ok(CoeffMap { space, values })
    }

    /// Inverse for the convolution product, solved word by word in order of
    /// increasing length. Works for any map with nonzero empty-word value.
    pub fn inverse(&self) -> Result<Self> {
        let head = self.values[0].clone();
        if head.is_negligible() {
            return Err(Error::NotInvertible);
        }
        let space = self.space;
        let inv_head = S::one() / head;
        let mut out = vec![S::zero(); space.len()];
        out[0] = inv_head.clone();
        for n in 1..=space.order() {
            for rank in 0..space.level_size(n) {
                let mut acc = S::zero();
                for j in 1..=n {
                    let (p, s) = space.split_rank(n, rank, j);
                    let left = &self.values[space.index_of_rank(j, p)];
                    if left.is_zero() {
                        continue;
                    }
                    acc = acc + left.clone() * out[space.index_of_rank(n - j, s)].clone();
                }
                out[space.index_of_rank(n, rank)] = -(acc * inv_head.clone());
            }
        }
        Ok(CoeffMap { space, values: out })
    }

    /// Checks `g_w g_w' = sum g_{w_j}` (characters) or `sum b_{w_j} = 0`
    /// (infinitesimal characters) over every ordered pair of nonempty words.
    fn shuffle_report(&self, quadratic: bool) -> ShuffleReport {
        let space = self.space;
        let n_max = space.order();
        let mut report = ShuffleReport::default();
        for len_a in 1..n_max {
            for len_b in 1..=(n_max - len_a) {
                for a in space.level(len_a) {
                    for b in space.level(len_b) {
                        let words = shuffle(&a, &b, n_max).expect("within order");
                        let mut rhs = S::zero();
                        let mut scale = 0.0f64;
                        for w in &words {
                            let c = &self.values[space.index(w).expect("within order")];
                            scale += c.to_c64().norm();
                            rhs = rhs + c.clone();
                        }
                        let lhs = if quadratic {
                            let l = self[&a].clone() * self[&b].clone();
                            scale += l.to_c64().norm();
                            l
                        } else {
                            S::zero()
                        };
                        report.relations_checked += 1;
                        if !crate::scalar::negligible_at(&(lhs - rhs), scale) {
                            report.violations.push((a.clone(), b.clone()));
                        }
                    }
                }
            }
        }
        report
    }

    pub fn character_report(&self) -> ShuffleReport {
        let mut report = self.shuffle_report(true);
        if !(self.values[0].clone() - S::one()).is_negligible() {
            report.violations.insert(0, (Word::empty(), Word::empty()));
        }
        report
    }

    pub fn infinitesimal_report(&self) -> ShuffleReport {
        let mut report = self.shuffle_report(false);
        if !self.values[0].is_negligible() {
            report.violations.insert(0, (Word::empty(), Word::empty()));
        }
        report
    }

    pub fn is_character(&self) -> bool {
        self.character_report().passed()
    }

    pub fn is_infinitesimal(&self) -> bool {
        self.infinitesimal_report().passed()
    }

    pub fn exp_star(&self) -> Result<Self> {
        if !self.values[0].is_negligible() {
            return Err(Error::Precondition("exp_star needs a zero empty-word coefficient".into()));
        }
        let mut result = Self::unit(self.alphabet(), self.order())?;
        let mut term = result.clone();
        for k in 1..=self.order() {
            term = term.convolve(self)?.scale(&(S::one() / S::from_i64(k as i64)));
            result = result.add(&term)?;
        }
        Ok(result)
    }

    pub fn log_star(&self) -> Result<Self> {
        if !(self.values[0].clone() - S::one()).is_negligible() {
            return Err(Error::Precondition("log_star needs empty-word coefficient one".into()));
        }
        let unit = Self::unit(self.alphabet(), self.order())?;
        let x = self.sub(&unit)?;
        let mut power = x.clone();
        let mut result = x.clone();
        for k in 2..=self.order() {
            power = power.convolve(&x)?;
            let c = S::from_ratio(if k % 2 == 0 { -1 } else { 1 }, k as i64);
            result = result.add(&power.scale(&c))?;
        }
        Ok(result)
    }

    /// Convolution bracket `[b, b2] = b ⋆ b2 - b2 ⋆ b`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        self.convolve(other)?.sub(&other.convolve(self)?)
    }

    /// Pairs `(w, b_w / |w|)` for every nonempty word, in canonical order:
    /// the weights of the left-nested commutators in the Dynkin–Specht–Wever
    /// rewriting of a word series with infinitesimal coefficients.
    pub fn dynkin_expansion(&self) -> Vec<(Word, S)> {
        self.iter()
            .skip(1)
            .map(|(w, c)| {
                let n = S::from_i64(w.len() as i64);
                (w, c.clone() / n)
            })
            .collect()
    }

    /// Largest coefficient-wise distance, measured in the complex norm.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a.to_c64() - b.to_c64()).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|a| a.to_c64().norm()).fold(0.0, f64::max)
    }
}

impl<S: Scalar> Index<&Word> for CoeffMap<S> {
    type Output = S;

    fn index(&self, w: &Word) -> &S {
        self.get(w).unwrap_or_else(|| panic!("word {w} outside coefficient table"))
    }
}

/// `k!` as a scalar.
pub fn factorial<S: Scalar>(k: usize) -> S {
    (1..=k).fold(S::one(), |acc, i| acc * S::from_i64(i as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{gaussian, gaussian_ratio, GaussianRational};
    use num_traits::One;

    type Q = GaussianRational;

    fn w(s: &str) -> Word {
        Word::from_letters(s.bytes().map(|b| (b - b'a') as usize))
    }

    #[test]
    fn unit_is_neutral() {
        let d = CoeffMap::<Q>::from_fn(2, 3, |w| gaussian(w.len() as i64 + 1, 1)).unwrap();
        let one = CoeffMap::unit(2, 3).unwrap();
        assert_eq!(one.convolve(&d).unwrap(), d);
        assert_eq!(d.convolve(&one).unwrap(), d);
    }

    #[test]
    fn convolution_on_two_letter_word() {
        let d = CoeffMap::<Q>::from_fn(2, 2, |w| gaussian(2 + w.len() as i64, 0)).unwrap();
        let e = CoeffMap::<Q>::from_fn(2, 2, |w| gaussian(1, w.len() as i64)).unwrap();
        let p = d.convolve(&e).unwrap();
        let ab = w("ab");
        let expected = d[&Word::empty()].clone() * e[&ab].clone()
            + d[&w("a")].clone() * e[&w("b")].clone()
            + d[&ab].clone() * e[&Word::empty()].clone();
        assert_eq!(p[&ab], expected);
        assert_eq!(p[&Word::empty()], d[&Word::empty()].clone() * e[&Word::empty()].clone());
    }

    #[test]
    fn mismatched_alphabets_rejected() {
        let a = CoeffMap::<Q>::unit(2, 2).unwrap();
        let b = CoeffMap::<Q>::unit(3, 2).unwrap();
        assert!(matches!(a.convolve(&b), Err(Error::AlphabetMismatch { .. })));
    }

    #[test]
    fn result_order_is_minimum() {
        let a = CoeffMap::<Q>::unit(2, 4).unwrap();
        let b = CoeffMap::<Q>::unit(2, 2).unwrap();
        assert_eq!(a.convolve(&b).unwrap().order(), 2);
        assert_eq!(b.add(&a).unwrap().order(), 2);
    }

    #[test]
    fn inverse_of_unit_and_geometric_series() {
        let one = CoeffMap::<Q>::unit(2, 4).unwrap();
        assert_eq!(one.inverse().unwrap(), one);

        let c = gaussian_ratio(3, 2);
        let mut g = one.clone();
        g.set(&w("a"), c.clone()).unwrap();
        let inv = g.inverse().unwrap();
        for n in 0..=4 {
            let an = Word::from_letters(std::iter::repeat(0).take(n));
            let mut expected = Q::one();
            for _ in 0..n {
                expected = expected * (-c.clone());
            }
            assert_eq!(inv[&an], expected);
        }
        assert_eq!(g.convolve(&inv).unwrap(), one);
    }

    #[test]
    fn inverse_requires_nonzero_head() {
        let z = CoeffMap::<Q>::zero(2, 2).unwrap();
        assert!(matches!(z.inverse(), Err(Error::NotInvertible)));
    }

    #[test]
    fn unit_is_character_zero_is_infinitesimal() {
        assert!(CoeffMap::<Q>::unit(2, 4).unwrap().is_character());
        assert!(CoeffMap::<Q>::zero(2, 4).unwrap().is_infinitesimal());
        assert!(!CoeffMap::<Q>::zero(2, 4).unwrap().is_character());
    }

    #[test]
    fn single_letter_infinitesimal() {
        let b = CoeffMap::<Q>::monomial(2, 2, &w("a"), Q::one()).unwrap();
        let report = b.infinitesimal_report();
        assert!(report.passed());
        // a⧢a, a⧢b, b⧢a, b⧢b
        assert_eq!(report.relations_checked, 4);
        // breaking b_ab + b_ba = 0 is detected
        let mut bad = b.clone();
        bad.set(&w("ab"), Q::one()).unwrap();
        assert!(!bad.is_infinitesimal());
    }

    #[test]
    fn relation_count_for_binary_alphabet_order_four() {
        let report = CoeffMap::<Q>::unit(2, 4).unwrap().character_report();
        let expected: usize = (2..=4).map(|n| (n - 1) * 2usize.pow(n as u32)).sum();
        assert_eq!(report.relations_checked, expected);
        assert_eq!(expected, 68);
    }

    #[test]
    fn exp_of_zero_and_letter_powers() {
        let z = CoeffMap::<Q>::zero(2, 4).unwrap();
        assert_eq!(z.exp_star().unwrap(), CoeffMap::unit(2, 4).unwrap());

        let ba = gaussian_ratio(2, 3);
        let b = CoeffMap::<Q>::monomial(2, 4, &w("a"), ba.clone()).unwrap();
        let e = b.exp_star().unwrap();
        for n in 0..=4usize {
            let an = Word::from_letters(std::iter::repeat(0).take(n));
            let mut pow = Q::one();
            for _ in 0..n {
                pow = pow * ba.clone();
            }
            assert_eq!(e[&an], pow / factorial::<Q>(n));
        }
        assert!(e.is_character());
    }

    #[test]
    fn exp_log_preconditions() {
        let one = CoeffMap::<Q>::unit(2, 3).unwrap();
        assert!(matches!(one.exp_star(), Err(Error::Precondition(_))));
        let z = CoeffMap::<Q>::zero(2, 3).unwrap();
        assert!(matches!(z.log_star(), Err(Error::Precondition(_))));
    }

    #[test]
    fn bracket_self_vanishes() {
        let b = CoeffMap::<Q>::from_fn(2, 3, |w| gaussian(w.len() as i64, 1)).unwrap();
        assert!(b.bracket(&b).unwrap().is_zero());
    }

    #[test]
    fn dynkin_weights() {
        let mut b = CoeffMap::<Q>::zero(2, 2).unwrap();
        b.set(&w("a"), gaussian(2, 0)).unwrap();
        b.set(&w("ab"), Q::one()).unwrap();
        let pairs = b.dynkin_expansion();
        assert_eq!(pairs.len(), 2 + 4);
        assert_eq!(pairs[0], (w("a"), gaussian(2, 0)));
        let ab = pairs.iter().find(|(x, _)| *x == w("ab")).unwrap();
        assert_eq!(ab.1, gaussian_ratio(1, 2));
    }

    #[test]
    fn float_character_tolerance() {
        let b = CoeffMap::<Complex64>::from_fn(2, 4, |w| {
            if w.len() == 1 {
                Complex64::new(0.3, -0.7 * w.letters()[0].0 as f64)
            } else {
                Complex64::zero()
            }
        })
        .unwrap();
        let g = b.exp_star().unwrap();
        assert!(g.is_character());
        let mut broken = g.clone();
        let v = broken[&w("ab")] + 1e-6;
        broken.set(&w("ab"), v).unwrap();
        assert!(!broken.is_character());
    }
}
