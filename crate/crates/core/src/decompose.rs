//! Commuting decomposition `beta = rho(v) + beta_bar` and the coefficients
//! `rho(u)` of formal invariants.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::coeff::CoeffMap;
use crate::error::{Error, Result};
use crate::freq::{frequency_scalar, FreqTable, FreqVector};
use crate::linalg::Vector;
use crate::normal_form::NormalFormResult;
use crate::scalar::{negligible_at, Scalar};
use crate::word::{Letter, Word, WordSpace};

#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition<S> {
    pub rho_v: CoeffMap<S>,
    pub beta_bar: CoeffMap<S>,
    /// Basis of the resonance space and `rho(u)` for each basis vector.
    pub basis: Vec<Vector>,
    pub rho: Vec<CoeffMap<S>>,
}

/// Violations found by [`FreqTable::verify_unique_characterization`], each
/// tagged with the relation it breaks.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CharacterizationReport {
    pub violations: Vec<(String, Word)>,
}

impl CharacterizationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn collect_violations<S: Scalar>(report: &mut CharacterizationReport, label: &str, map: &CoeffMap<S>, scale: f64) {
    for (w, c) in map.iter() {
        if !negligible_at(c, scale) {
            report.violations.push((label.to_string(), w));
        }
    }
}

impl FreqTable {
    /// `rho(u) = kappa^{-1} ⋆ xi_u kappa`.
    pub fn rho_from_kappa<S: Scalar>(&self, kappa: &CoeffMap<S>, u: &FreqVector) -> Result<CoeffMap<S>> {
        kappa.inverse()?.convolve(&self.small_xi(u, kappa)?)
    }

    /// Decomposition derived from a normal form of `beta`.
    pub fn decompose_from<S: Scalar>(
        &self,
        nf: &NormalFormResult<S>,
        beta: &CoeffMap<S>,
        basis: &[Vector],
    ) -> Result<Decomposition<S>> {
        let inv = nf.kappa.inverse()?;
        let beta_bar = inv.convolve(&nf.beta_hat)?.convolve(&nf.kappa)?;
        let rho_v = beta.sub(&beta_bar)?;
        let rho = basis
            .iter()
            .map(|u| self.rho_from_kappa(&nf.kappa, &FreqVector::Explicit(u.clone())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Decomposition { rho_v, beta_bar, basis: basis.to_vec(), rho })
    }

    /// Normal form followed by [`FreqTable::decompose_from`], with `V(v)`
    /// computed at the order of `beta`.
    pub fn decompose<S: Scalar>(&self, v: &FreqVector, beta: &CoeffMap<S>) -> Result<Decomposition<S>> {
        let nf = self.normal_form(v, beta)?;
        let basis = self.resonance_space(v, beta.order())?;
        self.decompose_from(&nf, beta, &basis)
    }

    /// `(u, rho(u))` for `u` in `V(v)`; its bracket with `(v, beta)`
    /// vanishes.
    pub fn invariant_coefficients<S: Scalar>(
        &self,
        u: &FreqVector,
        v: &FreqVector,
        beta: &CoeffMap<S>,
    ) -> Result<crate::extended::ExtCoeff<S>> {
        self.check_in_resonance_space(u, v, beta.order())?;
        let nf = self.normal_form(v, beta)?;
        Ok(crate::extended::ExtCoeff {
            v: u.clone(),
            delta: self.rho_from_kappa(&nf.kappa, u)?,
            class: crate::extended::Membership::Algebra,
        })
    }

    /// Map version: `(u, kappa^{-1} ⋆ xi_u kappa)` with `kappa` from the
    /// group normal form of `eta`; `u` must satisfy `exp(nu_w^u) = 1` on
    /// every resonant word.
    pub fn invariant_coefficients_map(
        &self,
        u: &FreqVector,
        v: &FreqVector,
        eta: &CoeffMap<Complex64>,
    ) -> Result<crate::extended::ExtCoeff<Complex64>> {
        let space = eta.space();
        let fv = self.nu_all(v, &space)?;
        let fu = self.nu_all(u, &space)?;
        for (i, (a, b)) in fv.iter().zip(&fu).enumerate() {
            if a.is_zero && (b.value.exp() - 1.0).norm() > crate::group_nf::MAP_DIVISOR_GUARD {
                return Err(Error::OutsideResonanceSpace { word: space.word_at(i).to_string() });
            }
        }
        let nf = self.group_normal_form(v, eta)?;
        Ok(crate::extended::ExtCoeff {
            v: u.clone(),
            delta: self.rho_from_kappa(&nf.kappa, u)?,
            class: crate::extended::Membership::Algebra,
        })
    }

    /// Choice of the distinguished letter `0`: a resonant letter, preferring
    /// one whose whole frequency row vanishes.
    pub fn zero_letter(&self, v: &FreqVector) -> Result<Letter> {
        let mut first = None;
        for l in 0..self.alphabet() {
            if !self.nu_word(v, &Word::letter(l))?.is_zero {
                continue;
            }
            if self.letter(l).iter().all(num_traits::Zero::is_zero) {
                return Ok(Letter(l as u16));
            }
            first.get_or_insert(Letter(l as u16));
        }
        first.ok_or_else(|| Error::UnsupportedModel("no letter with zero frequency".into()))
    }

    /// `beta_bar` for `beta` the letters indicator, by the closed recursion.
    pub fn beta_bar_recursion<S: Scalar>(&self, v: &FreqVector, order: usize) -> Result<CoeffMap<S>> {
        let mut seeds = HashMap::new();
        for l in 0..self.alphabet() {
            let resonant = self.nu_word(v, &Word::letter(l))?.is_zero;
            seeds.insert(l, if resonant { S::one() } else { S::zero() });
        }
        self.letter_recursion_seeded(v, order, &seeds)
    }

    /// `rho(u)` for `beta` the letters indicator, by the closed recursion.
    pub fn rho_recursion<S: Scalar>(&self, u: &FreqVector, v: &FreqVector, order: usize) -> Result<CoeffMap<S>> {
        self.check_in_resonance_space(u, v, order)?;
        let mut seeds: HashMap<usize, S> = HashMap::new();
        for l in 0..self.alphabet() {
            let fv = self.nu_word(v, &Word::letter(l))?;
            let value = if fv.is_zero {
                S::zero()
            } else {
                frequency_scalar::<S>(&self.nu_word(u, &Word::letter(l))?)? / frequency_scalar::<S>(&fv)?
            };
            seeds.insert(l, value);
        }
        self.letter_recursion_seeded(v, order, &seeds)
    }

    fn letter_recursion_seeded<S: Scalar>(
        &self,
        v: &FreqVector,
        order: usize,
        seeds: &HashMap<usize, S>,
    ) -> Result<CoeffMap<S>> {
        let space = WordSpace::new(self.alphabet(), order)?;
        let zero = self.zero_letter(v)?;
        let mut rec = Recursion { table: self, v, zero, seeds, memo: HashMap::new() };
        let mut values = vec![S::zero(); space.len()];
        for (i, w) in space.words().enumerate().skip(1) {
            values[i] = rec.value(&w)?;
        }
        CoeffMap::from_values(space.alphabet(), order, values)
    }

    /// Checks the relations that determine `beta_bar` and `rho(u)`
    /// uniquely.
    pub fn verify_unique_characterization<S: Scalar>(
        &self,
        v: &FreqVector,
        beta: &CoeffMap<S>,
        beta_bar: &CoeffMap<S>,
        rho: &[(FreqVector, CoeffMap<S>)],
    ) -> Result<CharacterizationReport> {
        let mut report = CharacterizationReport::default();
        let scale = beta.max_abs().max(beta_bar.max_abs());
        let space = beta.space();
        let all_resonant = |w: &Word| -> Result<bool> {
            for l in w.letters() {
                if !self.nu_word(v, &Word::from_iter([*l]))?.is_zero {
                    return Ok(false);
                }
            }
            Ok(!w.is_empty())
        };
        let flags: Vec<bool> = space.words().map(|w| all_resonant(&w)).collect::<Result<_>>()?;
        let bb = self.small_xi(v, beta_bar)?.add(&beta.bracket(beta_bar)?)?;
        collect_violations(&mut report, "xi_v beta_bar + [beta, beta_bar]", &bb, scale);
        let diff = beta.sub(beta_bar)?;
        let masked = diff.map(|w, c| if flags[space.index(w).expect("same space")] { c.clone() } else { S::zero() });
        collect_violations(&mut report, "beta_bar = beta on resonant-letter words", &masked, scale);
        for (u, r) in rho {
            let rel = self.small_xi(v, r)?.sub(&self.small_xi(u, beta)?)?.add(&beta.bracket(r)?)?;
            collect_violations(&mut report, "xi_v rho - xi_u beta + [beta, rho]", &rel, scale.max(r.max_abs()));
            let masked = r.map(|w, c| if flags[space.index(w).expect("same space")] { c.clone() } else { S::zero() });
            collect_violations(&mut report, "rho = 0 on resonant-letter words", &masked, scale);
        }
        Ok(report)
    }
}

struct Recursion<'a, S> {
    table: &'a FreqTable,
    v: &'a FreqVector,
    zero: Letter,
    seeds: &'a HashMap<usize, S>,
    memo: HashMap<Word, S>,
}

impl<S: Scalar> Recursion<'_, S> {
    fn value(&mut self, w: &Word) -> Result<S> {
        if let Some(x) = self.memo.get(w) {
            return Ok(x.clone());
        }
        let n = w.len();
        let out = if n == 1 {
            self.seeds[&w.letters()[0].index()].clone()
        } else {
            let f = self.table.nu_word(self.v, w)?;
            if !f.is_zero {
                let head = self.value(&w.slice(0, n - 1))?;
                let tail = self.value(&w.slice(1, n))?;
                (head - tail) / frequency_scalar::<S>(&f)?
            } else {
                let mut all_resonant = true;
                for l in w.letters() {
                    if !self.table.nu_word(self.v, &Word::from_iter([*l]))?.is_zero {
                        all_resonant = false;
                        break;
                    }
                }
                if all_resonant {
                    S::zero()
                } else {
                    self.value(&w.slice(0, n - 1).prepend(self.zero))?
                }
            }
        };
        self.memo.insert(w.clone(), out.clone());
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{gaussian, GaussianRational};

    type Q = GaussianRational;

    fn toy() -> FreqTable {
        FreqTable::imaginary_from_ints(2, &[vec![0, 0], vec![1, 2], vec![-1, -2]]).unwrap()
    }

    #[test]
    fn letter_base_cases() {
        let t = toy();
        let v = FreqVector::from_ints(&[1, 1]);
        let bb: CoeffMap<Q> = t.beta_bar_recursion(&v, 2).unwrap();
        assert_eq!(bb[&Word::letter(0)], gaussian(1, 0));
        assert_eq!(bb[&Word::letter(1)], gaussian(0, 0));
        // nonresonant pair: (bb_0 - bb_1) / nu_{01}
        let nu = t.nu_word(&v, &Word::from_letters([0, 1])).unwrap().exact.unwrap();
        assert_eq!(bb[&Word::from_letters([0, 1])], gaussian(1, 0) / nu);
    }

    #[test]
    fn recursions_match_decomposition() {
        let t = toy();
        let v = FreqVector::from_ints(&[1, 1]);
        let beta = CoeffMap::<Q>::letters_indicator(3, 4).unwrap();
        let dec = t.decompose(&v, &beta).unwrap();
        assert_eq!(t.beta_bar_recursion::<Q>(&v, 4).unwrap(), dec.beta_bar);
        for (u, rho) in dec.basis.iter().zip(&dec.rho) {
            let u = FreqVector::Explicit(u.clone());
            assert_eq!(&t.rho_recursion::<Q>(&u, &v, 4).unwrap(), rho);
        }
    }

    #[test]
    fn nonresonant_decomposition_is_trivial() {
        let t = FreqTable::imaginary_from_ints(1, &[vec![1], vec![2]]).unwrap();
        let beta = CoeffMap::<Q>::letters_indicator(2, 4).unwrap();
        let dec = t.decompose(&FreqVector::from_ints(&[1]), &beta).unwrap();
        assert!(dec.beta_bar.is_zero());
        assert_eq!(dec.rho_v, beta);
    }

    #[test]
    fn missing_zero_letter_is_unsupported() {
        let t = FreqTable::imaginary_from_ints(1, &[vec![1], vec![2]]).unwrap();
        assert!(matches!(
            t.beta_bar_recursion::<Q>(&FreqVector::from_ints(&[1]), 3),
            Err(Error::UnsupportedModel(_))
        ));
    }

    #[test]
    fn invariant_coefficients_linear_in_u() {
        let t = toy();
        let v = FreqVector::from_ints(&[1, 1]);
        let beta = CoeffMap::<Q>::letters_indicator(3, 4).unwrap();
        let a = t.invariant_coefficients(&FreqVector::from_ints(&[1, 0]), &v, &beta).unwrap();
        let b = t.invariant_coefficients(&FreqVector::from_ints(&[0, 1]), &v, &beta).unwrap();
        let ab = t.invariant_coefficients(&FreqVector::from_ints(&[1, 1]), &v, &beta).unwrap();
        assert_eq!(a.delta.add(&b.delta).unwrap(), ab.delta);
        let zero = t.invariant_coefficients(&FreqVector::zero(2), &v, &beta).unwrap();
        assert!(zero.delta.is_zero());
    }

    #[test]
    fn characterization_holds_for_decomposition() {
        let t = toy();
        let v = FreqVector::from_ints(&[1, 1]);
        let beta = CoeffMap::<Q>::letters_indicator(3, 4).unwrap();
        let dec = t.decompose(&v, &beta).unwrap();
        let rho: Vec<_> =
            dec.basis.iter().cloned().map(FreqVector::Explicit).zip(dec.rho.iter().cloned()).collect();
        let report = t.verify_unique_characterization(&v, &beta, &dec.beta_bar, &rho).unwrap();
        assert!(report.passed(), "{report:?}");
        let broken = dec.beta_bar.add(&CoeffMap::monomial(3, 4, &Word::letter(0), gaussian(1, 0)).unwrap()).unwrap();
        assert!(!t.verify_unique_characterization(&v, &beta, &broken, &rho).unwrap().passed());
    }
}
