//! Word basis functions, word series as fields and maps, and symbolic
//! composition of near-identity maps graded by `eps`.
//!
//! Every letter carries one power of `eps`, so a word series truncated at
//! order `N` is a polynomial identity in `eps` up to `eps^N`.

use std::collections::HashMap;

use num_complex::Complex64;
use wordseries_core::{CoeffMap, Error, ExtCoeff, FreqVector, Result, Scalar, Word, WordSpace};

use crate::field::{lie_bracket, GradedField, VectorField};
use crate::jet::Jet;
use crate::model::Model;
use crate::poly::{imag_unit, Poly};

/// The fields `f_w`, `f_{l1 l2..ln} = f'_{l2..ln} f_{l1}`, for all nonempty
/// words up to a given order. The empty word stands for the identity map.
#[derive(Clone, Debug)]
pub struct WordBasis<S> {
    space: WordSpace,
    dim: usize,
    angles: usize,
    fields: Vec<VectorField<S>>,
}

impl<S: Scalar> WordBasis<S> {
    pub fn new(letters: &[VectorField<S>], order: usize) -> Result<Self> {
        let space = WordSpace::new(letters.len(), order)?;
        let first = letters.first().ok_or_else(|| Error::Precondition("empty alphabet".into()))?;
        let (dim, angles) = (first.dim(), first.angles());
        let mut fields = Vec::with_capacity(space.len());
        fields.push(VectorField::zero(dim, angles));
        for n in 1..=order {
            for rank in 0..space.level_size(n) {
                let w = space.word_of_rank(n, rank);
                let head = &letters[w.letters()[0].index()];
                let f = if n == 1 {
                    head.clone()
                } else {
                    let tail = space.index(&w.slice(1, n))?;
                    fields[tail].jac_apply(head)?
                };
                fields.push(f);
            }
        }
        Ok(WordBasis { space, dim, angles, fields })
    }

    pub fn from_model(model: &Model<S>, order: usize) -> Result<Self> {
        Self::new(&model.letter_fields(), order)
    }

    pub fn space(&self) -> &WordSpace {
        &self.space
    }

    pub fn order(&self) -> usize {
        self.space.order()
    }

    /// `f_w`; `None` for the empty word (the identity map).
    pub fn field(&self, w: &Word) -> Result<Option<&VectorField<S>>> {
        let i = self.space.index(w)?;
        Ok((i > 0).then(|| &self.fields[i]))
    }

    fn check(&self, delta: &CoeffMap<S>) -> Result<()> {
        if delta.alphabet() != self.space.alphabet() || delta.order() > self.order() {
            return Err(Error::Precondition(format!(
                "coefficients over {} letters to order {} do not fit the basis",
                delta.alphabet(),
                delta.order()
            )));
        }
        Ok(())
    }

    /// `sum_{|w| = n} delta_w f_w` for each `n >= 1`.
    fn level_sums(&self, delta: &CoeffMap<S>) -> Result<Vec<VectorField<S>>> {
        self.check(delta)?;
        let space = delta.space();
        let mut levels = vec![VectorField::zero(self.dim, self.angles); delta.order() + 1];
        for (i, c) in delta.values().iter().enumerate().skip(1) {
            if c.is_zero() {
                continue;
            }
            let n = self.space.index(&space.word_at(i))?;
            let len = space.word_at(i).len();
            levels[len] = levels[len].add(&self.fields[n].scale(c))?;
        }
        Ok(levels)
    }

    /// The word series `W_beta` as a graded field. Requires `beta_∅ = 0`.
    pub fn series_field(&self, beta: &CoeffMap<S>) -> Result<GradedField<S>> {
        if !beta.empty_word_value().is_zero() {
            return Err(Error::Precondition("a word series field needs a zero empty-word coefficient".into()));
        }
        GradedField::from_levels(self.level_sums(beta)?)
    }

    /// The word series `W_delta` as a graded near-identity map. Requires
    /// `delta_∅ = 1`.
    pub fn series_map(&self, delta: &CoeffMap<S>) -> Result<GradedMap<S>> {
        if !delta.empty_word_value().is_one() {
            return Err(Error::Precondition("a word series map needs delta_∅ = 1".into()));
        }
        let levels = self.level_sums(delta)?;
        let disp = levels.into_iter().map(|f| f.components().to_vec()).collect();
        Ok(GradedMap { dim: self.dim, angles: self.angles, disp })
    }

    /// `W_delta(x) = delta_∅ x + sum_w eps^{|w|} delta_w f_w(x)`.
    pub fn eval(&self, delta: &CoeffMap<S>, x: &[Complex64], eps: f64) -> Result<Vec<Complex64>> {
        self.check(delta)?;
        let space = delta.space();
        let e0 = delta.empty_word_value().to_c64();
        let mut out: Vec<Complex64> = x.iter().map(|xi| xi * e0).collect();
        for (i, c) in delta.values().iter().enumerate().skip(1) {
            if c.is_zero() {
                continue;
            }
            let w = space.word_at(i);
            let weight = c.to_c64() * eps.powi(w.len() as i32);
            let n = self.space.index(&w)?;
            for (o, f) in out.iter_mut().zip(self.fields[n].eval(x)) {
                *o += weight * f;
            }
        }
        Ok(out)
    }

    /// `W_delta(y)` at a point given by series in `eps`.
    pub fn eval_jet(&self, delta: &CoeffMap<S>, y: &[Jet]) -> Result<Vec<Jet>> {
        self.check(delta)?;
        let space = delta.space();
        let e0 = delta.empty_word_value().to_c64();
        let mut out: Vec<Jet> = y.iter().map(|yi| yi.scale(e0)).collect();
        for (i, c) in delta.values().iter().enumerate().skip(1) {
            if c.is_zero() {
                continue;
            }
            let w = space.word_at(i);
            let n = self.space.index(&w)?;
            for (o, f) in out.iter_mut().zip(self.fields[n].eval_jet(y)) {
                *o = o.add(&f.scale(c.to_c64()).shift(w.len()));
            }
        }
        Ok(out)
    }
}

/// Left-nested commutators `I_w = [[..[f_l1, f_l2], ..], f_ln]` for all
/// nonempty words up to `order`.
pub fn commutator_fields<S: Scalar>(letters: &[VectorField<S>], order: usize) -> Result<Vec<VectorField<S>>> {
    let space = WordSpace::new(letters.len(), order)?;
    let first = letters.first().ok_or_else(|| Error::Precondition("empty alphabet".into()))?;
    let mut out = Vec::with_capacity(space.len());
    out.push(VectorField::zero(first.dim(), first.angles()));
    for n in 1..=order {
        for rank in 0..space.level_size(n) {
            let w = space.word_of_rank(n, rank);
            let last = &letters[w.letters()[n - 1].index()];
            let f = if n == 1 { last.clone() } else { lie_bracket(&out[space.index(&w.slice(0, n - 1))?], last)? };
            out.push(f);
        }
    }
    Ok(out)
}

/// `sum_w (beta_w / |w|) I_w`, graded by word length.
pub fn dynkin_field<S: Scalar>(letters: &[VectorField<S>], beta: &CoeffMap<S>) -> Result<GradedField<S>> {
    let commutators = commutator_fields(letters, beta.order())?;
    let space = beta.space();
    let first = &letters[0];
    let mut levels = vec![VectorField::zero(first.dim(), first.angles()); beta.order() + 1];
    for (w, c) in beta.dynkin_expansion() {
        if c.is_zero() {
            continue;
        }
        let n = w.len();
        levels[n] = levels[n].add(&commutators[space.index(&w)?].scale(&c))?;
    }
    GradedField::from_levels(levels)
}

/// Graded near-identity map `x -> x + sum_n eps^n D_n(x)`. The `eps^0`
/// displacement of an angle must be constant.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedMap<S> {
    dim: usize,
    angles: usize,
    /// `disp[n][i]`.
    disp: Vec<Vec<Poly<S>>>,
}

type Series<S> = Vec<Poly<S>>;

impl<S: Scalar> GradedMap<S> {
    pub fn identity(dim: usize, angles: usize, order: usize) -> Self {
        GradedMap { dim, angles, disp: vec![vec![Poly::zero(dim, angles); dim]; order + 1] }
    }

    /// Time-one flow of `g^v`. Exact mode requires every rate to vanish on
    /// the polynomial variables.
    pub fn flow(model: &Model<S>, v: &FreqVector, order: usize) -> Result<Self> {
        let c = model.combined_rates(v)?;
        let mut map = Self::identity(model.dim, model.angles, order);
        let m = model.dim - model.angles;
        for (i, ci) in c.into_iter().enumerate() {
            map.disp[0][i] = if i < m {
                let e = ci.try_exp().ok_or_else(|| Error::InexactExponential { word: format!("flow rate of x{i}") })?;
                Poly::var(model.dim, model.angles, i).scale(&(e - S::one()))
            } else {
                Poly::constant(model.dim, model.angles, ci)
            };
        }
        Ok(map)
    }

    pub fn order(&self) -> usize {
        self.disp.len() - 1
    }

    pub fn displacement(&self, n: usize, i: usize) -> &Poly<S> {
        &self.disp[n][i]
    }

    fn zero_series(&self) -> Series<S> {
        vec![Poly::zero(self.dim, self.angles); self.order() + 1]
    }

    fn mul_series(&self, a: &Series<S>, b: &Series<S>) -> Series<S> {
        let n = self.order();
        let mut out = self.zero_series();
        for i in 0..=n {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..=n - i {
                if !b[j].is_zero() {
                    out[i + j] = out[i + j].add(&a[i].mul(&b[j]));
                }
            }
        }
        out
    }

    /// `exp` of a series with vanishing constant term.
    fn exp_series(&self, x: &Series<S>) -> Series<S> {
        let mut y = self.zero_series();
        y[0] = Poly::constant(self.dim, self.angles, S::one());
        for m in 1..=self.order() {
            let mut acc = Poly::zero(self.dim, self.angles);
            for k in 1..=m {
                if !x[k].is_zero() {
                    acc = acc.add(&x[k].mul(&y[m - k]).scale(&S::from_i64(k as i64)));
                }
            }
            y[m] = acc.scale(&S::from_ratio(1, m as i64));
        }
        y
    }

    /// `p(x + D(x))` as a series in `eps`.
    pub fn substitute(&self, p: &Poly<S>) -> Result<Series<S>> {
        let m = self.dim - self.angles;
        let mut powers: HashMap<(usize, i32), Series<S>> = HashMap::new();
        let mut out = self.zero_series();
        for (key, c) in p.terms() {
            let mut mono = vec![0; self.dim];
            let mut factor = c.clone();
            let mut series: Option<Series<S>> = None;
            for (i, &e) in key.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let piece = if i < m {
                    self.power(&mut powers, i, e)
                } else {
                    mono[i] = e;
                    let ik = imag_unit::<S>() * S::from_i64(e as i64);
                    let base = &self.disp[0][i];
                    if base.terms().any(|(k, _)| k.iter().any(|&x| x != 0)) {
                        return Err(Error::Precondition(format!("angle displacement of theta{i} is not constant")));
                    }
                    let c0 = base.coefficient(&vec![0; self.dim]);
                    factor = factor
                        * (ik.clone() * c0)
                            .try_exp()
                            .ok_or_else(|| Error::InexactExponential { word: format!("angle shift of theta{i}") })?;
                    if let Some(s) = powers.get(&(i, e)) {
                        s.clone()
                    } else {
                        let mut x = self.zero_series();
                        for n in 1..=self.order() {
                            x[n] = self.disp[n][i].scale(&ik);
                        }
                        let s = self.exp_series(&x);
                        powers.insert((i, e), s.clone());
                        s
                    }
                };
                series = Some(match series {
                    None => piece,
                    Some(acc) => self.mul_series(&acc, &piece),
                });
            }
            let base = Poly::monomial(self.dim, self.angles, mono, factor);
            match series {
                None => out[0] = out[0].add(&base),
                Some(s) => {
                    for (o, t) in out.iter_mut().zip(s) {
                        if !t.is_zero() {
                            *o = o.add(&t.mul(&base));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// `(x_i + D_i)^e` for a polynomial variable.
    fn power(&self, cache: &mut HashMap<(usize, i32), Series<S>>, i: usize, e: i32) -> Series<S> {
        if let Some(s) = cache.get(&(i, e)) {
            return s.clone();
        }
        let mut base = self.zero_series();
        base[0] = Poly::var(self.dim, self.angles, i);
        for n in 0..=self.order() {
            base[n] = base[n].add(&self.disp[n][i]);
        }
        let s = if e == 1 { base } else { self.mul_series(&self.power(cache, i, e - 1), &base) };
        cache.insert((i, e), s.clone());
        s
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &GradedMap<S>) -> Result<GradedMap<S>> {
        let n = self.order().min(inner.order());
        let mut disp = inner.disp[..=n].to_vec();
        for i in 0..self.dim {
            for (k, level) in self.disp.iter().enumerate().take(n + 1) {
                if level[i].is_zero() {
                    continue;
                }
                let s = inner.truncate(n).substitute(&level[i])?;
                for (j, t) in s.into_iter().enumerate().take(n + 1 - k) {
                    disp[j + k][i] = disp[j + k][i].add(&t);
                }
            }
        }
        Ok(GradedMap { dim: self.dim, angles: self.angles, disp })
    }

    pub fn truncate(&self, order: usize) -> GradedMap<S> {
        GradedMap { dim: self.dim, angles: self.angles, disp: self.disp[..=order.min(self.order())].to_vec() }
    }

    pub fn sub(&self, other: &GradedMap<S>) -> GradedMap<S> {
        let disp = self
            .disp
            .iter()
            .zip(&other.disp)
            .map(|(a, b)| a.iter().zip(b).map(|(p, q)| p.sub(q)).collect())
            .collect();
        GradedMap { dim: self.dim, angles: self.angles, disp }
    }

    pub fn is_zero(&self) -> bool {
        self.disp.iter().flatten().all(Poly::is_zero)
    }

    pub fn is_negligible(&self, scale: f64) -> bool {
        self.disp.iter().flatten().all(|p| p.is_negligible(scale))
    }

    pub fn max_abs(&self) -> f64 {
        self.disp.iter().flatten().map(Poly::max_abs).fold(0.0, f64::max)
    }

    /// The image of `x` as one series per coordinate.
    pub fn eval_jet(&self, x: &[Complex64]) -> Vec<Jet> {
        (0..self.dim)
            .map(|i| {
                let mut c: Vec<Complex64> = self.disp.iter().map(|level| level[i].eval(x)).collect();
                c[0] += x[i];
                Jet::from_coefficients(c)
            })
            .collect()
    }
}

/// `phi_v(W_delta(x))` at a numeric `eps`.
pub fn eval_ext_series<S: Scalar>(
    model: &Model<S>,
    basis: &WordBasis<S>,
    a: &ExtCoeff<S>,
    x: &[Complex64],
    eps: f64,
) -> Result<Vec<Complex64>> {
    Ok(model.flow(&a.v, &basis.eval(&a.delta, x, eps)?))
}

/// `phi_v(W_delta(y))` at a point given by series in `eps`.
pub fn eval_ext_series_jet<S: Scalar>(
    model: &Model<S>,
    basis: &WordBasis<S>,
    a: &ExtCoeff<S>,
    y: &[Jet],
) -> Result<Vec<Jet>> {
    Ok(model.flow_jet(&a.v, &basis.eval_jet(&a.delta, y)?))
}
