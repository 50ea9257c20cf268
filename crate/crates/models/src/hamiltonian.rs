//! Hamiltonian models. The state is `(p; q)` with `p` the first half of the
//! variables; angles sit at the end of `q`.
//!
//! Sign convention: the field of `H` is `(-dH/dq, dH/dp)` and
//! `{H, K} = sum_i dH/dp_i dK/dq_i - dH/dq_i dK/dp_i`, so that the field of
//! `{H, K}` is the Lie–Jacobi bracket `[X_H, X_K] = X_K' X_H - X_H' X_K`.
//! This is opposite to the more common convention.

use num_complex::Complex64;
use wordseries_core::{CoeffMap, Error, ExtCoeff, FreqVector, Result, Scalar, Word, WordSpace};

use crate::field::VectorField;
use crate::model::Model;
use crate::poly::Poly;

fn half(h: &Poly<impl Scalar>) -> Result<usize> {
    if h.nvars() % 2 != 0 {
        return Err(Error::UnsupportedModel("a Hamiltonian needs an even number of variables".into()));
    }
    if h.angles() > h.nvars() / 2 {
        return Err(Error::UnsupportedModel("angles must lie in the coordinate half".into()));
    }
    Ok(h.nvars() / 2)
}

pub fn poisson<S: Scalar>(h: &Poly<S>, k: &Poly<S>) -> Result<Poly<S>> {
    let m = half(h)?;
    let mut out = Poly::zero(h.nvars(), h.angles());
    for i in 0..m {
        let hp = h.derivative(i);
        let kq = k.derivative(m + i);
        if !hp.is_zero() && !kq.is_zero() {
            out = out.add(&hp.mul(&kq));
        }
        let hq = h.derivative(m + i);
        let kp = k.derivative(i);
        if !hq.is_zero() && !kp.is_zero() {
            out = out.sub(&hq.mul(&kp));
        }
    }
    Ok(out)
}

/// `J^{-1} grad H = (-dH/dq, dH/dp)`.
pub fn hamiltonian_field<S: Scalar>(h: &Poly<S>) -> Result<VectorField<S>> {
    let m = half(h)?;
    let mut comps: Vec<Poly<S>> = (0..m).map(|i| h.derivative(m + i).neg()).collect();
    comps.extend((0..m).map(|i| h.derivative(i)));
    VectorField::new(comps)
}

/// `H_w = (1/n) {{..{H_l1, H_l2}..}, H_ln}` for every nonempty word up to
/// a given order.
#[derive(Clone, Debug)]
pub struct HamiltonianBasis<S> {
    space: WordSpace,
    nested: Vec<Poly<S>>,
}

impl<S: Scalar> HamiltonianBasis<S> {
    pub fn new(letters: &[Poly<S>], order: usize) -> Result<Self> {
        let space = WordSpace::new(letters.len(), order)?;
        let first = letters.first().ok_or_else(|| Error::Precondition("empty alphabet".into()))?;
        let mut nested = Vec::with_capacity(space.len());
        nested.push(Poly::zero(first.nvars(), first.angles()));
        for n in 1..=order {
            for rank in 0..space.level_size(n) {
                let w = space.word_of_rank(n, rank);
                let last = &letters[w.letters()[n - 1].index()];
                let h = if n == 1 { last.clone() } else { poisson(&nested[space.index(&w.slice(0, n - 1))?], last)? };
                nested.push(h);
            }
        }
        Ok(HamiltonianBasis { space, nested })
    }

    pub fn from_model(model: &Model<S>, order: usize) -> Result<Self> {
        let hs = letter_hamiltonians(model)?;
        Self::new(&hs, order)
    }

    pub fn order(&self) -> usize {
        self.space.order()
    }

    /// `H_w`; `None` for the empty word.
    pub fn hamiltonian(&self, w: &Word) -> Result<Option<Poly<S>>> {
        let i = self.space.index(w)?;
        Ok((i > 0).then(|| self.nested[i].scale(&S::from_ratio(1, w.len() as i64))))
    }
}

fn letter_hamiltonians<S: Scalar>(model: &Model<S>) -> Result<Vec<Poly<S>>> {
    model
        .letters
        .iter()
        .map(|l| {
            l.hamiltonian
                .clone()
                .ok_or_else(|| Error::UnsupportedModel(format!("letter {} has no Hamiltonian", l.name)))
        })
        .collect()
}

fn commuting_hamiltonians<S: Scalar>(model: &Model<S>) -> Result<&[Poly<S>]> {
    model
        .commuting_hamiltonians
        .as_deref()
        .ok_or_else(|| Error::UnsupportedModel(format!("model {} has no commuting Hamiltonians", model.name)))
}

/// `H_w` for a single word.
pub fn word_hamiltonian<S: Scalar>(w: &Word, model: &Model<S>) -> Result<Poly<S>> {
    if w.is_empty() {
        return Err(Error::Precondition("the empty word has no Hamiltonian".into()));
    }
    let hs = letter_hamiltonians(model)?;
    let mut acc = hs[w.letters()[0].index()].clone();
    for l in &w.letters()[1..] {
        acc = poisson(&acc, &hs[l.index()])?;
    }
    Ok(acc.scale(&S::from_ratio(1, w.len() as i64)))
}

/// Function series `sum_n eps^n H_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedHamiltonian<S> {
    levels: Vec<Poly<S>>,
}

impl<S: Scalar> GradedHamiltonian<S> {
    pub fn from_levels(levels: Vec<Poly<S>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Precondition("graded Hamiltonian without levels".into()));
        }
        Ok(GradedHamiltonian { levels })
    }

    pub fn order(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> &Poly<S> {
        &self.levels[n]
    }

    pub fn levels(&self) -> &[Poly<S>] {
        &self.levels
    }

    pub fn sub(&self, other: &Self) -> Self {
        GradedHamiltonian { levels: self.levels.iter().zip(&other.levels).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.levels.iter().all(Poly::is_zero)
    }

    pub fn is_negligible(&self, scale: f64) -> bool {
        self.levels.iter().all(|p| p.is_negligible(scale))
    }

    pub fn max_abs(&self) -> f64 {
        self.levels.iter().map(Poly::max_abs).fold(0.0, f64::max)
    }

    /// Graded Poisson bracket truncated at the common order.
    pub fn poisson(&self, other: &Self) -> Result<Self> {
        let n = self.order().min(other.order());
        let (nv, na) = (self.levels[0].nvars(), self.levels[0].angles());
        let mut levels = vec![Poly::zero(nv, na); n + 1];
        for i in 0..=n {
            if self.levels[i].is_zero() {
                continue;
            }
            for j in 0..=n - i {
                if !other.levels[j].is_zero() {
                    levels[i + j] = levels[i + j].add(&poisson(&self.levels[i], &other.levels[j])?);
                }
            }
        }
        Ok(GradedHamiltonian { levels })
    }

    /// `sum_n eps^n H_n(x)`.
    pub fn eval(&self, x: &[Complex64], eps: f64) -> Complex64 {
        self.levels.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, h| acc * eps + h.eval(x))
    }

    pub fn to_float(&self) -> GradedHamiltonian<Complex64> {
        GradedHamiltonian { levels: self.levels.iter().map(Poly::to_float).collect() }
    }
}

/// `H_{(v, beta)} = sum_j v_j H_j + sum_w eps^{|w|} beta_w H_w`.
pub fn assemble_hamiltonian<S: Scalar>(
    model: &Model<S>,
    basis: &HamiltonianBasis<S>,
    a: &ExtCoeff<S>,
) -> Result<GradedHamiltonian<S>> {
    let hj = commuting_hamiltonians(model)?;
    assemble_parts(hj, basis, &a.v, &a.delta)
}

fn assemble_parts<S: Scalar>(
    hj: &[Poly<S>],
    basis: &HamiltonianBasis<S>,
    v: &FreqVector,
    beta: &CoeffMap<S>,
) -> Result<GradedHamiltonian<S>> {
    if beta.order() > basis.order() {
        return Err(Error::Precondition("coefficients beyond the Hamiltonian basis order".into()));
    }
    if !beta.empty_word_value().is_zero() {
        return Err(Error::Precondition("a Hamiltonian series needs a zero empty-word coefficient".into()));
    }
    let first = &hj[0];
    let mut levels = vec![Poly::zero(first.nvars(), first.angles()); beta.order() + 1];
    let vs: Vec<S> = match v {
        FreqVector::Explicit(x) => x.iter().map(S::from_gaussian).collect(),
        FreqVector::Generic(x) => x
            .iter()
            .map(|z| S::from_c64(*z).ok_or(Error::ModeMismatch { expected: wordseries_core::Mode::Float, found: S::MODE }))
            .collect::<Result<_>>()?,
    };
    for (h, c) in hj.iter().zip(&vs) {
        levels[0] = levels[0].add(&h.scale(c));
    }
    for (w, c) in beta.iter().skip(1) {
        if c.is_zero() {
            continue;
        }
        let h = basis.hamiltonian(&w)?.expect("nonempty word");
        levels[w.len()] = levels[w.len()].add(&h.scale(c));
    }
    GradedHamiltonian::from_levels(levels)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct HamiltonianReport {
    /// Letters whose Hamiltonian field differs from `f_l`.
    pub field_failures: Vec<usize>,
    /// Indices `j` whose Hamiltonian field differs from `g_j`.
    pub commuting_field_failures: Vec<usize>,
    /// `(j, k)` with `{H_j, H_k} != 0`.
    pub commute_failures: Vec<(usize, usize)>,
    /// `(j, l)` with `{H_j, H_l} != nu_{j,l} H_l`.
    pub eigen_failures: Vec<(usize, usize)>,
}

impl HamiltonianReport {
    pub fn passed(&self) -> bool {
        self.field_failures.is_empty()
            && self.commuting_field_failures.is_empty()
            && self.commute_failures.is_empty()
            && self.eigen_failures.is_empty()
    }
}

impl<S: Scalar> Model<S> {
    /// Symbolic check of the Hamiltonian structure: fields derive from the
    /// declared Hamiltonians, `{H_j, H_k} = 0` and `{H_j, H_l} = nu_{j,l} H_l`.
    pub fn verify_hamiltonian(&self) -> Result<HamiltonianReport> {
        self.validate()?;
        let hj = commuting_hamiltonians(self)?;
        let hl = letter_hamiltonians(self)?;
        let mut report = HamiltonianReport::default();
        for (l, h) in hl.iter().enumerate() {
            let f = &self.letters[l].field;
            if !hamiltonian_field(h)?.sub(f)?.is_negligible(f.max_abs()) {
                report.field_failures.push(l);
            }
        }
        for (j, h) in hj.iter().enumerate() {
            let g = self.g(j);
            if !hamiltonian_field(h)?.sub(&g)?.is_negligible(1.0) {
                report.commuting_field_failures.push(j);
            }
            for (k, other) in hj.iter().enumerate().skip(j + 1) {
                if !poisson(h, other)?.is_negligible(1.0) {
                    report.commute_failures.push((j, k));
                }
            }
            for (l, hl) in hl.iter().enumerate() {
                let nu = S::from_gaussian(&self.table.letter(l)[j]);
                if !poisson(h, hl)?.sub(&hl.scale(&nu)).is_negligible(hl.max_abs()) {
                    report.eigen_failures.push((j, l));
                }
            }
        }
        Ok(report)
    }
}
