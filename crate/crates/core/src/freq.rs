//! Frequencies of letters under the commuting unperturbed fields and the
//! exact resonance bookkeeping derived from them.

use num_complex::Complex64;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{self, Vector};
use crate::scalar::{format_gaussian, GaussianRational, Mode, Scalar, FLOAT_TOLERANCE};
use crate::word::{Word, WordSpace};

/// Table of `nu[l][j]`: eigenvalue of letter `l` under the `j`-th commuting
/// field.
#[derive(Clone, Debug, PartialEq)]
pub struct FreqTable {
    d: usize,
    nu: Vec<Vector>,
}

/// A weight vector `v` in `C^d`, together with the rule that decides
/// resonance of a word.
#[derive(Clone, Debug, PartialEq)]
pub enum FreqVector {
    /// Exact Gaussian-rational components; `nu_w^v = v . s(w)` is tested
    /// exactly.
    Explicit(Vector),
    /// Numeric components assumed rationally independent: `nu_w^v` vanishes
    /// exactly when the letter sum `s(w)` does.
    Generic(Vec<Complex64>),
}

/// Value of `nu_w^v` and its exact resonance decision.
#[derive(Clone, Debug, PartialEq)]
pub struct WordFrequency {
    pub value: Complex64,
    pub exact: Option<GaussianRational>,
    pub is_zero: bool,
}

impl FreqVector {
    pub fn zero(d: usize) -> Self {
        FreqVector::Explicit(vec![GaussianRational::zero(); d])
    }

    pub fn from_ints(xs: &[i64]) -> Self {
        FreqVector::Explicit(xs.iter().map(|&x| crate::scalar::gaussian(x, 0)).collect())
    }

    pub fn dim(&self) -> usize {
        match self {
            FreqVector::Explicit(v) => v.len(),
            FreqVector::Generic(v) => v.len(),
        }
    }

    pub fn numeric(&self) -> Vec<Complex64> {
        match self {
            FreqVector::Explicit(v) => v.iter().map(|x| x.to_c64()).collect(),
            FreqVector::Generic(v) => v.clone(),
        }
    }

    pub fn exact(&self) -> Option<&[GaussianRational]> {
        match self {
            FreqVector::Explicit(v) => Some(v),
            FreqVector::Generic(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FreqVector::Explicit(v) => v.iter().all(Zero::is_zero),
            FreqVector::Generic(v) => v.iter().all(|x| *x == Complex64::zero()),
        }
    }

    /// Sum; stays explicit only when both summands are.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(match (self, other) {
            (FreqVector::Explicit(a), FreqVector::Explicit(b)) => {
                FreqVector::Explicit(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            _ => FreqVector::Generic(self.numeric().iter().zip(other.numeric()).map(|(x, y)| x + y).collect()),
        })
    }

    /// Multiple `c v`. A zero factor always yields the explicit zero vector.
    pub fn scale<S: Scalar>(&self, c: &S) -> Self {
        if c.is_zero() {
            return FreqVector::zero(self.dim());
        }
        match (self, c.to_gaussian()) {
            (FreqVector::Explicit(v), Some(q)) => FreqVector::Explicit(v.iter().map(|x| x * &q).collect()),
            _ => {
                let z = c.to_c64();
                FreqVector::Generic(self.numeric().iter().map(|x| x * z).collect())
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            FreqVector::Explicit(v) => json!({
                "model": "explicit",
                "v": v.iter().map(format_gaussian).collect::<Vec<_>>(),
            }),
            FreqVector::Generic(v) => json!({
                "model": "generic",
                "v": v.iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>(),
            }),
        }
    }
}

impl FreqTable {
    pub fn new(d: usize, nu: Vec<Vector>) -> Result<Self> {
        for row in &nu {
            if row.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: row.len() });
            }
        }
        if nu.is_empty() {
            return Err(Error::Precondition("frequency table needs at least one letter".into()));
        }
        Ok(FreqTable { d, nu })
    }

    /// Table with `nu[l][j] = i k_l[j]`, the angle-shift case.
    pub fn imaginary_from_ints(d: usize, ks: &[Vec<i64>]) -> Result<Self> {
        let nu = ks.iter().map(|k| k.iter().map(|&x| crate::scalar::gaussian(0, x)).collect()).collect();
        Self::new(d, nu)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn alphabet(&self) -> usize {
        self.nu.len()
    }

    pub fn letter(&self, l: usize) -> &Vector {
        &self.nu[l]
    }

    fn check_dim(&self, v: &FreqVector) -> Result<()> {
        if v.dim() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: v.dim() });
        }
        Ok(())
    }

    /// Letter sum `s(w) = sum_i nu[l_i]`.
    pub fn letter_sum(&self, w: &Word) -> Result<Vector> {
        let mut s = vec![GaussianRational::zero(); self.d];
        for l in w.letters() {
            let row = self.nu.get(l.index()).ok_or(Error::LetterOutOfRange {
                letter: l.index(),
                alphabet: self.alphabet(),
            })?;
            for (acc, x) in s.iter_mut().zip(row) {
                *acc = &*acc + x;
            }
        }
        Ok(s)
    }

    fn frequency_of_sum(&self, v: &FreqVector, s: &Vector) -> WordFrequency {
        match v {
            FreqVector::Explicit(v) => {
                let q = dot(v, s);
                WordFrequency { value: q.to_c64(), is_zero: q.is_zero(), exact: Some(q) }
            }
            FreqVector::Generic(v) => {
                let is_zero = s.iter().all(Zero::is_zero);
                let value = if is_zero {
                    Complex64::zero()
                } else {
                    v.iter().zip(s).map(|(a, b)| a * b.to_c64()).sum()
                };
                WordFrequency { value, exact: is_zero.then(GaussianRational::zero), is_zero }
            }
        }
    }

    /// `nu_w^v`, with the resonance decision made on exact data only.
    pub fn nu_word(&self, v: &FreqVector, w: &Word) -> Result<WordFrequency> {
        self.check_dim(v)?;
        Ok(self.frequency_of_sum(v, &self.letter_sum(w)?))
    }

    /// Frequencies of every word of `space`, in canonical order.
    pub fn nu_all(&self, v: &FreqVector, space: &WordSpace) -> Result<Vec<WordFrequency>> {
        self.check_dim(v)?;
        if space.alphabet() != self.alphabet() {
            return Err(Error::AlphabetMismatch { left: space.alphabet(), right: self.alphabet() });
        }
        Ok(self.letter_sums(space).iter().map(|s| self.frequency_of_sum(v, s)).collect())
    }

    /// Letter sums of all words of `space`, built incrementally from
    /// prefixes.
    pub fn letter_sums(&self, space: &WordSpace) -> Vec<Vector> {
        let a = space.alphabet();
        let mut sums: Vec<Vector> = Vec::with_capacity(space.len());
        sums.push(vec![GaussianRational::zero(); self.d]);
        for n in 1..=space.order() {
            for rank in 0..space.level_size(n) {
                let parent = space.index_of_rank(n - 1, rank / a);
                let row = &self.nu[rank % a];
                let s = sums[parent].iter().zip(row).map(|(x, y)| x + y).collect();
                sums.push(s);
            }
        }
        sums
    }

    /// `nu_w^v` for every word as scalars of mode `S`; resonant words get an
    /// exact zero. Generic vectors are only representable in float mode.
    pub fn nu_scalars<S: Scalar>(&self, v: &FreqVector, space: &WordSpace) -> Result<Vec<S>> {
        self.nu_all(v, space)?.into_iter().map(|f| frequency_scalar(&f)).collect()
    }

    pub fn resonant_flags(&self, v: &FreqVector, space: &WordSpace) -> Result<Vec<bool>> {
        Ok(self.nu_all(v, space)?.into_iter().map(|f| f.is_zero).collect())
    }

    /// Per-letter `nu_l^v` as scalars of mode `S`.
    pub fn letter_nus<S: Scalar>(&self, v: &FreqVector) -> Result<Vec<S>> {
        (0..self.alphabet()).map(|l| frequency_scalar(&self.nu_word(v, &Word::letter(l))?)).collect()
    }

    /// Exact basis of `V(v)`: the vectors `u` with `u . s(w) = 0` for every
    /// resonant word of length at most `order`.
    pub fn resonance_space(&self, v: &FreqVector, order: usize) -> Result<Vec<Vector>> {
        let space = WordSpace::new(self.alphabet(), order)?;
        let rows = self.resonant_sums(v, &space)?;
        Ok(linalg::kernel(&rows, self.d))
    }

    fn resonant_sums(&self, v: &FreqVector, space: &WordSpace) -> Result<Vec<Vector>> {
        self.check_dim(v)?;
        let mut rows: Vec<Vector> = Vec::new();
        for s in self.letter_sums(space) {
            if self.frequency_of_sum(v, &s).is_zero && s.iter().any(|x| !x.is_zero()) && !rows.contains(&s) {
                rows.push(s);
            }
        }
        Ok(rows)
    }

    /// Whether `V(v)` computed at `order` and `order + 1` coincide.
    pub fn resonance_space_is_stable(&self, v: &FreqVector, order: usize) -> Result<bool> {
        let a = self.resonance_space(v, order)?;
        let b = self.resonance_space(v, order + 1)?;
        Ok(a.len() == b.len() && linalg::same_span(&a, &b, self.d))
    }

    /// Checks that `nu^u` vanishes on every `v`-resonant word up to `order`.
    /// Returns the first offending word.
    pub fn check_in_resonance_space(&self, u: &FreqVector, v: &FreqVector, order: usize) -> Result<()> {
        self.check_dim(u)?;
        let space = WordSpace::new(self.alphabet(), order)?;
        let fv = self.nu_all(v, &space)?;
        let fu = self.nu_all(u, &space)?;
        for (i, (a, b)) in fv.iter().zip(&fu).enumerate() {
            if !a.is_zero {
                continue;
            }
            let vanishes = match &b.exact {
                Some(q) => q.is_zero(),
                None => b.value.norm() <= FLOAT_TOLERANCE,
            };
            if !vanishes {
                return Err(Error::OutsideResonanceSpace { word: space.word_at(i).to_string() });
            }
        }
        Ok(())
    }

    /// Words where the numeric value of `nu_w^v` disagrees with the exact
    /// resonance decision (resonant but nonzero, or nonresonant but below
    /// `FLOAT_TOLERANCE`).
    pub fn consistency_violations(&self, v: &FreqVector, order: usize) -> Result<Vec<Word>> {
        let space = WordSpace::new(self.alphabet(), order)?;
        let numeric = v.numeric();
        let mut bad = Vec::new();
        for (i, s) in self.letter_sums(&space).iter().enumerate() {
            let direct: Complex64 = numeric.iter().zip(s).map(|(a, b)| a * b.to_c64()).sum();
            let declared = self.frequency_of_sum(v, s);
            let ok = if declared.is_zero {
                direct.norm() < FLOAT_TOLERANCE
            } else {
                direct.norm() >= FLOAT_TOLERANCE && (direct - declared.value).norm() < FLOAT_TOLERANCE
            };
            if !ok {
                bad.push(space.word_at(i));
            }
        }
        Ok(bad)
    }
}

fn dot(a: &[GaussianRational], b: &[GaussianRational]) -> GaussianRational {
    a.iter().zip(b).fold(GaussianRational::zero(), |acc, (x, y)| acc + x * y)
}

/// The frequency as a scalar of mode `S`.
pub fn frequency_scalar<S: Scalar>(f: &WordFrequency) -> Result<S> {
    if f.is_zero {
        return Ok(S::zero());
    }
    match &f.exact {
        Some(q) => Ok(S::from_gaussian(q)),
        None => S::from_c64(f.value).ok_or(Error::ModeMismatch { expected: Mode::Float, found: S::MODE }),
    }
}
