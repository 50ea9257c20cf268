//! Model instances: perturbing fields `f_l` indexed by an alphabet, the
//! commuting diagonal fields `g_j`, their frequency table and closed-form
//! flows.
//!
//! Each `g_j` is given by one rate per variable: `r x_i d/dx_i` for a
//! polynomial variable and the constant advance `r d/dtheta_i` for an angle.
//! The flow of `g^v = sum_j v_j g_j` at time 1 is then
//! `x_i -> exp(c_i) x_i`, `theta_i -> theta_i + c_i` with
//! `c_i = sum_j v_j r_{j,i}`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wordseries_core::linalg::Vector;
use wordseries_core::{Error, FreqTable, FreqVector, GaussianRational, Mode, Result, Scalar};

use crate::field::{lie_bracket, VectorField};
use crate::jet::Jet;
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq)]
pub struct LetterSpec<S> {
    pub name: String,
    pub payload: Vec<i64>,
    pub field: VectorField<S>,
    pub hamiltonian: Option<Poly<S>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Model<S> {
    pub name: String,
    pub dim: usize,
    pub angles: usize,
    pub letters: Vec<LetterSpec<S>>,
    /// `rates[j][i]`.
    pub rates: Vec<Vec<S>>,
    pub commuting_hamiltonians: Option<Vec<Poly<S>>>,
    pub table: FreqTable,
    pub v: Option<FreqVector>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AssumptionReport {
    /// `(j, letter)` pairs where `[g_j, f_l] != nu_{j,l} f_l`.
    pub letter_failures: Vec<(usize, usize)>,
    pub commute_failures: Vec<(usize, usize)>,
    /// `(j, letter)` pairs failing the numeric pullback identity.
    pub pullback_failures: Vec<(usize, usize)>,
}

impl AssumptionReport {
    pub fn passed(&self) -> bool {
        self.letter_failures.is_empty() && self.commute_failures.is_empty() && self.pullback_failures.is_empty()
    }

    pub fn failing_letters(&self) -> Vec<usize> {
        let mut ls: Vec<usize> =
            self.letter_failures.iter().chain(&self.pullback_failures).map(|&(_, l)| l).collect();
        ls.sort_unstable();
        ls.dedup();
        ls
    }
}

/// Exact rates as scalars of mode `S`.
fn vector_scalar<S: Scalar>(v: &FreqVector) -> Result<Vec<S>> {
    match v {
        FreqVector::Explicit(x) => Ok(x.iter().map(S::from_gaussian).collect()),
        FreqVector::Generic(x) => x
            .iter()
            .map(|z| S::from_c64(*z).ok_or(Error::ModeMismatch { expected: Mode::Float, found: S::MODE }))
            .collect(),
    }
}

impl<S: Scalar> Model<S> {
    pub fn validate(&self) -> Result<()> {
        if self.angles > self.dim {
            return Err(Error::Precondition("more angles than variables".into()));
        }
        if self.table.alphabet() != self.letters.len() {
            return Err(Error::DimensionMismatch { expected: self.letters.len(), found: self.table.alphabet() });
        }
        if self.rates.len() != self.table.d() {
            return Err(Error::DimensionMismatch { expected: self.table.d(), found: self.rates.len() });
        }
        for r in &self.rates {
            if r.len() != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, found: r.len() });
            }
        }
        for l in &self.letters {
            if l.field.dim() != self.dim || l.field.angles() != self.angles {
                return Err(Error::Precondition(format!("letter {} has the wrong shape", l.name)));
            }
        }
        if let Some(v) = &self.v {
            if v.dim() != self.table.d() {
                return Err(Error::DimensionMismatch { expected: self.table.d(), found: v.dim() });
            }
        }
        if let Some(hs) = &self.commuting_hamiltonians {
            if hs.len() != self.table.d() {
                return Err(Error::DimensionMismatch { expected: self.table.d(), found: hs.len() });
            }
        }
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.table.d()
    }

    pub fn alphabet(&self) -> usize {
        self.letters.len()
    }

    pub fn letter_fields(&self) -> Vec<VectorField<S>> {
        self.letters.iter().map(|l| l.field.clone()).collect()
    }

    pub fn is_hamiltonian(&self) -> bool {
        self.commuting_hamiltonians.is_some() && self.letters.iter().all(|l| l.hamiltonian.is_some())
    }

    pub fn v(&self) -> Result<&FreqVector> {
        self.v.as_ref().ok_or_else(|| Error::Precondition(format!("model {} declares no v", self.name)))
    }

    /// The commuting field `g_j`.
    pub fn g(&self, j: usize) -> VectorField<S> {
        self.rate_field(&self.rates[j])
    }

    fn rate_field(&self, rates: &[S]) -> VectorField<S> {
        let m = self.dim - self.angles;
        let comps = rates
            .iter()
            .enumerate()
            .map(|(i, r)| {
                if i < m {
                    Poly::var(self.dim, self.angles, i).scale(r)
                } else {
                    Poly::constant(self.dim, self.angles, r.clone())
                }
            })
            .collect();
        VectorField::new(comps).expect("rate field shape")
    }

    /// Per-variable flow exponents `c_i = sum_j v_j r_{j,i}`.
    pub fn combined_rates(&self, v: &FreqVector) -> Result<Vec<S>> {
        let vs = vector_scalar::<S>(v)?;
        Ok((0..self.dim)
            .map(|i| vs.iter().zip(&self.rates).fold(S::zero(), |acc, (vj, r)| acc + vj.clone() * r[i].clone()))
            .collect())
    }

    /// `g^v = sum_j v_j g_j`.
    pub fn g_v(&self, v: &FreqVector) -> Result<VectorField<S>> {
        Ok(self.rate_field(&self.combined_rates(v)?))
    }

    fn numeric_rates(&self, v: &FreqVector) -> Vec<Complex64> {
        let vs = v.numeric();
        (0..self.dim)
            .map(|i| vs.iter().zip(&self.rates).map(|(vj, r)| vj * r[i].to_c64()).sum())
            .collect()
    }

    /// Time-one flow of `g^v`.
    pub fn flow(&self, v: &FreqVector, x: &[Complex64]) -> Vec<Complex64> {
        let m = self.dim - self.angles;
        self.numeric_rates(v)
            .iter()
            .zip(x)
            .enumerate()
            .map(|(i, (c, xi))| if i < m { xi * c.exp() } else { xi + c })
            .collect()
    }

    pub fn flow_jet(&self, v: &FreqVector, x: &[Jet]) -> Vec<Jet> {
        let m = self.dim - self.angles;
        self.numeric_rates(v)
            .iter()
            .zip(x)
            .enumerate()
            .map(|(i, (c, xi))| if i < m { xi.scale(c.exp()) } else { xi.add_constant(*c) })
            .collect()
    }

    /// Sum of all letter fields, the perturbation for the letters indicator.
    pub fn total_perturbation(&self) -> VectorField<S> {
        self.letters
            .iter()
            .fold(VectorField::zero(self.dim, self.angles), |acc, l| acc.add(&l.field).expect("shape"))
    }

    /// Symbolic check of `[g_j, f_l] = nu_{j,l} f_l` and `[g_j, g_k] = 0`,
    /// plus a numeric spot check of the pullback identity
    /// `phi_t'(x)^{-1} f_l(phi_t(x)) = exp(t nu_{j,l}) f_l(x)` for the flow
    /// of each `g_j`.
    pub fn verify_assumption(&self, seed: u64) -> Result<AssumptionReport> {
        self.validate()?;
        let mut report = AssumptionReport::default();
        let gs: Vec<VectorField<S>> = (0..self.d()).map(|j| self.g(j)).collect();
        for (j, g) in gs.iter().enumerate() {
            for (k, h) in gs.iter().enumerate().skip(j + 1) {
                if !lie_bracket(g, h)?.is_negligible(1.0) {
                    report.commute_failures.push((j, k));
                }
            }
            for (l, spec) in self.letters.iter().enumerate() {
                let nu = S::from_gaussian(&self.table.letter(l)[j]);
                let lhs = lie_bracket(g, &spec.field)?;
                let scale = spec.field.max_abs().max(1.0);
                if !lhs.sub(&spec.field.scale(&nu))?.is_negligible(scale) {
                    report.letter_failures.push((j, l));
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points: Vec<Vec<Complex64>> = (0..3).map(|_| self.sample_point(&mut rng)).collect();
        let t = 0.3;
        for j in 0..self.d() {
            let mut e = vec![wordseries_core::scalar::gaussian(0, 0); self.d()];
            e[j] = wordseries_core::scalar::gaussian_ratio(3, 10);
            let tv = FreqVector::Explicit(e);
            let c = self.numeric_rates(&tv);
            for (l, spec) in self.letters.iter().enumerate() {
                let nu = self.table.letter(l)[j].to_c64();
                let factor = (nu * t).exp();
                let bad = points.iter().any(|x| {
                    let moved = spec.field.eval(&self.flow(&tv, x));
                    let base = spec.field.eval(x);
                    moved.iter().zip(&base).enumerate().any(|(i, (m, b))| {
                        let back = if i < self.dim - self.angles { m * (-c[i]).exp() } else { *m };
                        (back - factor * b).norm() > 1e-8 * (1.0 + b.norm())
                    })
                });
                if bad {
                    report.pullback_failures.push((j, l));
                }
            }
        }
        Ok(report)
    }

    /// A real sample point: polynomial variables in `[-1/2, 1/2]`, angles in
    /// `[0, 2 pi)`.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Complex64> {
        let m = self.dim - self.angles;
        (0..self.dim)
            .map(|i| {
                let x = if i < m { rng.gen_range(-0.5..0.5) } else { rng.gen_range(0.0..std::f64::consts::TAU) };
                Complex64::new(x, 0.0)
            })
            .collect()
    }

    pub fn map_coefficients<T: Scalar>(&self, mut f: impl FnMut(&S) -> T) -> Model<T> {
        Model {
            name: self.name.clone(),
            dim: self.dim,
            angles: self.angles,
            letters: self
                .letters
                .iter()
                .map(|l| LetterSpec {
                    name: l.name.clone(),
                    payload: l.payload.clone(),
                    field: l.field.map_coefficients(&mut f),
                    hamiltonian: l.hamiltonian.as_ref().map(|h| h.map_coefficients(&mut f)),
                })
                .collect(),
            rates: self.rates.iter().map(|r| r.iter().map(&mut f).collect()).collect(),
            commuting_hamiltonians: self
                .commuting_hamiltonians
                .as_ref()
                .map(|hs| hs.iter().map(|h| h.map_coefficients(&mut f)).collect()),
            table: self.table.clone(),
            v: self.v.clone(),
        }
    }

    pub fn to_float(&self) -> Model<Complex64> {
        self.map_coefficients(|c| c.to_c64())
    }
}

/// Output of [`eigen_split`].
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSplit {
    /// Distinct nonzero eigenvalues, in order of first appearance.
    pub mus: Vec<GaussianRational>,
    pub model: Model<GaussianRational>,
}

/// Splits a polynomial field `f` into eigenvectors of the adjoint action of
/// the spectral projections of a diagonal matrix `L = diag(lambda)`.
///
/// The term `c x^m e_r` carries the integer vector `k` with
/// `k_j = sum_{i: lambda_i = mu_j} m_i - [lambda_r = mu_j]`.
pub fn eigen_split(lambda: &[GaussianRational], f: &VectorField<GaussianRational>) -> Result<EigenSplit> {
    use num_traits::Zero;
    let dim = lambda.len();
    if f.dim() != dim || f.angles() != 0 {
        return Err(Error::UnsupportedModel("eigen splitting needs a polynomial field of matching dimension".into()));
    }
    let mut mus: Vec<GaussianRational> = Vec::new();
    for l in lambda {
        if !l.is_zero() && !mus.contains(l) {
            mus.push(l.clone());
        }
    }
    if mus.is_empty() {
        return Err(Error::UnsupportedModel("all eigenvalues vanish".into()));
    }
    let d = mus.len();
    let class: Vec<Option<usize>> = lambda.iter().map(|l| mus.iter().position(|m| m == l)).collect();
    let mut pieces: BTreeMap<Vec<i64>, Vec<Poly<GaussianRational>>> = BTreeMap::new();
    for (r, comp) in f.components().iter().enumerate() {
        for (key, c) in comp.terms() {
            let mut k = vec![0i64; d];
            for (i, &e) in key.iter().enumerate() {
                if let Some(j) = class[i] {
                    k[j] += e as i64;
                }
            }
            if let Some(j) = class[r] {
                k[j] -= 1;
            }
            let entry = pieces.entry(k).or_insert_with(|| vec![Poly::zero(dim, 0); dim]);
            entry[r].add_term(key.clone(), c.clone());
        }
    }
    let mut letters = Vec::with_capacity(pieces.len());
    let mut nu = Vec::with_capacity(pieces.len());
    for (k, comps) in pieces {
        nu.push(k.iter().map(|&x| wordseries_core::scalar::gaussian(x, 0)).collect::<Vector>());
        letters.push(LetterSpec {
            name: format!("{k:?}"),
            payload: k,
            field: VectorField::new(comps)?,
            hamiltonian: None,
        });
    }
    let one = wordseries_core::scalar::gaussian(1, 0);
    let zero = wordseries_core::scalar::gaussian(0, 0);
    let rates = (0..d)
        .map(|j| class.iter().map(|c| if *c == Some(j) { one.clone() } else { zero.clone() }).collect())
        .collect();
    let model = Model {
        name: "eigen-split".into(),
        dim,
        angles: 0,
        table: FreqTable::new(d, nu)?,
        letters,
        rates,
        commuting_hamiltonians: None,
        v: Some(FreqVector::Explicit(mus.clone())),
    };
    model.validate()?;
    Ok(EigenSplit { mus, model })
}

/// Relabels an eigen split whose spectrum is symmetric,
/// `mu_{d+1-j} = -mu_j`, by the differences `k_j - k_{d+1-j}`, merging
/// letters with equal labels. The commuting fields become
/// `L_j - L_{d+1-j}`, `j <= d/2`.
pub fn symmetric_reduction(split: &EigenSplit) -> Result<EigenSplit> {
    let d = split.mus.len();
    if d % 2 != 0 {
        return Err(Error::UnsupportedModel("symmetric reduction needs an even number of eigenvalues".into()));
    }
    for j in 0..d / 2 {
        if split.mus[d - 1 - j] != -split.mus[j].clone() {
            return Err(Error::UnsupportedModel("spectrum is not symmetric".into()));
        }
    }
    let half = d / 2;
    let model = &split.model;
    let mut merged: BTreeMap<Vec<i64>, VectorField<GaussianRational>> = BTreeMap::new();
    for l in &model.letters {
        let k: Vec<i64> = (0..half).map(|j| l.payload[j] - l.payload[d - 1 - j]).collect();
        match merged.get_mut(&k) {
            Some(f) => *f = f.add(&l.field)?,
            None => {
                merged.insert(k, l.field.clone());
            }
        }
    }
    let mut letters = Vec::new();
    let mut nu = Vec::new();
    for (k, field) in merged {
        if field.is_zero() {
            continue;
        }
        nu.push(k.iter().map(|&x| wordseries_core::scalar::gaussian(x, 0)).collect::<Vector>());
        letters.push(LetterSpec { name: format!("{k:?}"), payload: k, field, hamiltonian: None });
    }
    let rates: Vec<Vec<GaussianRational>> = (0..half)
        .map(|j| model.rates[j].iter().zip(&model.rates[d - 1 - j]).map(|(a, b)| a - b).collect())
        .collect();
    let mus: Vec<GaussianRational> = split.mus[..half].to_vec();
    let reduced = Model {
        name: format!("{}-reduced", model.name),
        dim: model.dim,
        angles: 0,
        table: FreqTable::new(half, nu)?,
        letters,
        rates,
        commuting_hamiltonians: None,
        v: Some(FreqVector::Explicit(mus.clone())),
    };
    reduced.validate()?;
    Ok(EigenSplit { mus, model: reduced })
}
