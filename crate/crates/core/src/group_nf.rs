//! Normal form of extended group elements `(v, eta)`: a character `kappa`
//! with `(v, kappa ⋆ eta ⋆ Xi_v kappa^{-1}) = (v, eta_hat)` and
//! `Xi_v eta_hat = eta_hat`.
//!
//! At a word `w` the unknowns enter as
//! `eta_hat_w + (e^{nu_w} - 1) kappa_w = known_w`. The gauge on resonant
//! words is the same as in the continuous case: `(log kappa)_w = 0`.

use num_complex::Complex64;

use crate::coeff::CoeffMap;
use crate::error::{Error, Result};
use crate::freq::{FreqTable, FreqVector};
use crate::normal_form::{proper_split_sum, NormalFormReport};
use crate::scalar::{negligible_at, Scalar};
use crate::word::Word;

/// Guard band for the divisors `e^{nu_w} - 1` on nonresonant words.
pub const MAP_DIVISOR_GUARD: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct GroupNormalForm<S> {
    pub v: FreqVector,
    pub kappa: CoeffMap<S>,
    pub eta_hat: CoeffMap<S>,
    pub resonant: Vec<bool>,
}

impl FreqTable {
    pub fn group_normal_form<S: Scalar>(&self, v: &FreqVector, eta: &CoeffMap<S>) -> Result<GroupNormalForm<S>> {
        if !eta.is_character() {
            return Err(Error::Precondition("group normal form requires a character".into()));
        }
        let space = eta.space();
        let freqs = self.nu_all(v, &space)?;
        let resonant: Vec<bool> = freqs.iter().map(|f| f.is_zero).collect();
        let mut exps: Vec<Option<S>> = Vec::with_capacity(space.len());
        for (i, f) in freqs.iter().enumerate() {
            if f.is_zero {
                exps.push(Some(S::one()));
                continue;
            }
            let divisor = (f.value.exp() - 1.0).norm();
            if divisor <= MAP_DIVISOR_GUARD {
                return Err(Error::SmallDivisor { word: space.word_at(i).to_string(), magnitude: divisor });
            }
            exps.push(S::from_c64(f.value.exp()));
        }
        let inexact = |i: usize| Error::InexactExponential { word: space.word_at(i).to_string() };
        let e = eta.values();
        let mut kappa = CoeffMap::unit(space.alphabet(), space.order())?;
        let mut hat = vec![S::zero(); space.len()];
        hat[0] = S::one();
        // Xi_v kappa, filled level by level
        let mut xk = vec![S::zero(); space.len()];
        xk[0] = S::one();
        for n in 1..=space.order() {
            let neutral = crate::normal_form::log_neutral_level(&kappa, n)?;
            let start = space.index_of_rank(n, 0);
            let mut values = kappa.values().to_vec();
            for rank in 0..space.level_size(n) {
                let idx = start + rank;
                let known = e[idx].clone() + proper_split_sum(&space, n, rank, kappa.values(), e)
                    - proper_split_sum(&space, n, rank, &hat, &xk);
                let k = if resonant[idx] {
                    hat[idx] = known;
                    neutral[rank].clone()
                } else {
                    let ex = exps[idx].clone().ok_or_else(|| inexact(idx))?;
                    known / (ex - S::one())
                };
                if !k.is_zero() {
                    xk[idx] = exps[idx].clone().ok_or_else(|| inexact(idx))? * k.clone();
                }
                values[idx] = k;
            }
            kappa = CoeffMap::from_values(space.alphabet(), space.order(), values)?;
        }
        Ok(GroupNormalForm {
            v: v.clone(),
            kappa,
            eta_hat: CoeffMap::from_values(space.alphabet(), space.order(), hat)?,
            resonant,
        })
    }

    /// `eta_hat - kappa ⋆ eta ⋆ Xi_v kappa^{-1}`.
    pub fn group_normal_form_residual<S: Scalar>(
        &self,
        nf: &GroupNormalForm<S>,
        eta: &CoeffMap<S>,
    ) -> Result<CoeffMap<S>> {
        let conj = nf.kappa.convolve(eta)?.convolve(&self.big_xi(&nf.v, &nf.kappa.inverse()?)?)?;
        nf.eta_hat.sub(&conj)
    }

    pub fn check_group_normal_form<S: Scalar>(
        &self,
        nf: &GroupNormalForm<S>,
        eta: &CoeffMap<S>,
    ) -> Result<NormalFormReport> {
        let residual = self.group_normal_form_residual(nf, eta)?;
        let scale = eta.max_abs().max(nf.kappa.max_abs());
        let space = residual.space();
        Ok(NormalFormReport {
            residual_violations: residual.iter().filter(|(_, c)| !negligible_at(*c, scale)).map(|(w, _)| w).collect(),
            support_violations: (1..space.len())
                .filter(|&i| !nf.resonant[i] && !nf.eta_hat.values()[i].is_negligible())
                .map(|i| space.word_at(i))
                .collect(),
            kappa_is_character: nf.kappa.is_character(),
            hat_in_class: nf.eta_hat.is_character(),
            max_residual: residual.max_abs(),
        })
    }

    /// `kappa~ = delta ⋆ kappa`, `eta_hat~ = delta ⋆ eta_hat ⋆ delta^{-1}`
    /// for a character `delta` with `Xi_v delta = delta`.
    pub fn group_gauge_transform<S: Scalar>(
        &self,
        nf: &GroupNormalForm<S>,
        delta: &CoeffMap<S>,
    ) -> Result<GroupNormalForm<S>> {
        if !delta.is_character() {
            return Err(Error::Precondition("gauge transform requires a character".into()));
        }
        let moved = self.big_xi_numeric(&nf.v, delta)?;
        let scale = delta.max_abs();
        if let Some((w, _)) = moved
            .sub(&delta.to_float())?
            .iter()
            .find(|(_, c)| !negligible_at::<Complex64>(c, scale))
        {
            return Err(Error::Precondition(format!("Xi_v delta differs from delta at word {w}")));
        }
        Ok(GroupNormalForm {
            v: nf.v.clone(),
            kappa: delta.convolve(&nf.kappa)?,
            eta_hat: delta.convolve(&nf.eta_hat)?.convolve(&delta.inverse()?)?,
            resonant: nf.resonant.clone(),
        })
    }
}

impl<S: Scalar> GroupNormalForm<S> {
    pub fn resonant_words(&self) -> Vec<Word> {
        let space = self.kappa.space();
        (1..space.len()).filter(|&i| self.resonant[i]).map(|i| space.word_at(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extended::{ExtCoeff, Membership};
    use crate::random::{random_character, random_infinitesimal};
    use crate::scalar::gaussian_ratio;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toy() -> FreqTable {
        FreqTable::imaginary_from_ints(2, &[vec![0, 0], vec![1, 2], vec![-1, -2]]).unwrap()
    }

    fn v() -> FreqVector {
        FreqVector::Explicit(vec![gaussian_ratio(1, 3), gaussian_ratio(1, 5)])
    }

    #[test]
    fn identity_stays_identity() {
        let t = toy();
        let one = CoeffMap::<Complex64>::unit(3, 4).unwrap();
        let nf = t.group_normal_form(&v(), &one).unwrap();
        assert!(nf.kappa.max_abs_diff(&one) < 1e-15);
        assert!(nf.eta_hat.max_abs_diff(&one) < 1e-15);
    }

    #[test]
    fn random_characters_reduce() {
        let t = toy();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..4 {
            let eta: CoeffMap<Complex64> = random_character(3, 4, &mut rng).unwrap();
            let nf = t.group_normal_form(&v(), &eta).unwrap();
            let report = t.check_group_normal_form(&nf, &eta).unwrap();
            assert!(report.passed(), "{report:?}");
        }
    }

    #[test]
    fn matches_continuous_normal_form() {
        let t = toy();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let beta: CoeffMap<Complex64> = random_infinitesimal(3, 4, &mut rng).unwrap();
        let eta = t.ext_exp(&ExtCoeff { v: v(), delta: beta.clone(), class: Membership::Algebra }).unwrap().delta;
        let g = t.group_normal_form(&v(), &eta).unwrap();
        let c = t.normal_form(&v(), &beta).unwrap();
        assert!(g.kappa.max_abs_diff(&c.kappa) < 1e-12);
        assert!(g.eta_hat.max_abs_diff(&c.beta_hat.exp_star().unwrap()) < 1e-12);
    }

    #[test]
    fn multiplicative_resonance_is_a_small_divisor() {
        let t = toy();
        // nu_k = i (k . v) = 2 pi i for k = (1, 2) and v = (2 pi, 0)
        let v = FreqVector::Generic(vec![Complex64::new(2.0 * std::f64::consts::PI, 0.0), Complex64::new(0.0, 0.0)]);
        let eta = CoeffMap::<Complex64>::unit(3, 2).unwrap();
        assert!(matches!(t.group_normal_form(&v, &eta), Err(Error::SmallDivisor { .. })));
    }
}
