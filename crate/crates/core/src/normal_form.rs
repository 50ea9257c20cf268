//! Continuous normal form: `kappa` and `beta_hat` with
//! `beta_hat ⋆ kappa = kappa ⋆ beta - xi_v kappa`, `xi_v beta_hat = 0`.
//!
//! The solve runs level by level in word length. At a word `w` the unknowns
//! enter as `nu_w kappa_w + beta_hat_w = known_w`. Nonresonant words get
//! `beta_hat_w = 0`. On resonant words `kappa_w` is fixed by requiring
//! `(log kappa)_w = sigma_w` for a resonant-supported infinitesimal gauge
//! `sigma` (zero by default); this keeps `kappa` a character.

use serde_json::{json, Value};

use crate::coeff::CoeffMap;
use crate::error::{Error, Result};
use crate::freq::{FreqTable, FreqVector};
use crate::scalar::{negligible_at, Scalar};
use crate::word::{Word, WordSpace};

pub const DEFAULT_GAUGE: &str = "log_kappa_zero_on_resonant";

#[derive(Clone, Debug, PartialEq)]
pub struct NormalFormResult<S> {
    pub v: FreqVector,
    pub kappa: CoeffMap<S>,
    pub beta_hat: CoeffMap<S>,
    pub order: usize,
    pub resonant: Vec<bool>,
}

/// Outcome of the invariant checks of a normal form.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NormalFormReport {
    /// Words where the homological residual does not vanish.
    pub residual_violations: Vec<Word>,
    /// Nonresonant words where `beta_hat` is nonzero.
    pub support_violations: Vec<Word>,
    pub kappa_is_character: bool,
    /// `beta_hat` infinitesimal (continuous case) or `eta_hat` a character
    /// (map case).
    pub hat_in_class: bool,
    pub max_residual: f64,
}

impl NormalFormReport {
    pub fn passed(&self) -> bool {
        self.residual_violations.is_empty()
            && self.support_violations.is_empty()
            && self.kappa_is_character
            && self.hat_in_class
    }
}

/// Value of `kappa` at each word of level `n` that makes `(log kappa)_w`
/// vanish, given `kappa` on the shorter words.
pub(crate) fn log_neutral_level<S: Scalar>(kappa: &CoeffMap<S>, n: usize) -> Result<Vec<S>> {
    let space = kappa.space();
    let partial = kappa.truncate(n).restrict(|w| w.len() < n);
    let log = partial.log_star()?;
    let start = space.index_of_rank(n, 0);
    Ok((0..space.level_size(n)).map(|r| -log.values()[start + r].clone()).collect())
}

/// Sum over proper splits `w = w1 w2` of `left_{w1} right_{w2}`.
pub(crate) fn proper_split_sum<S: Scalar>(
    space: &WordSpace,
    n: usize,
    rank: usize,
    left: &[S],
    right: &[S],
) -> S {
    let mut acc = S::zero();
    for j in 1..n {
        let (p, s) = space.split_rank(n, rank, j);
        let a = &left[space.index_of_rank(j, p)];
        if a.is_zero() {
            continue;
        }
        let b = &right[space.index_of_rank(n - j, s)];
        if b.is_zero() {
            continue;
        }
        acc = acc + a.clone() * b.clone();
    }
    acc
}

impl FreqTable {
    pub fn normal_form<S: Scalar>(&self, v: &FreqVector, beta: &CoeffMap<S>) -> Result<NormalFormResult<S>> {
        self.normal_form_with_gauge(v, beta, None)
    }

    /// Normal form whose `kappa` has `(log kappa)_w = sigma_w` on resonant
    /// words. `sigma` must be infinitesimal and supported on resonant words.
    pub fn normal_form_with_gauge<S: Scalar>(
        &self,
        v: &FreqVector,
        beta: &CoeffMap<S>,
        sigma: Option<&CoeffMap<S>>,
    ) -> Result<NormalFormResult<S>> {
        if !beta.is_infinitesimal() {
            return Err(Error::Precondition("normal form requires an infinitesimal character".into()));
        }
        let space = beta.space();
        let nus: Vec<S> = self.nu_scalars(v, &space)?;
        let resonant = self.resonant_flags(v, &space)?;
        if let Some(sigma) = sigma {
            if sigma.space() != space {
                return Err(Error::Precondition("gauge must live on the same word space".into()));
            }
            if !sigma.is_infinitesimal() {
                return Err(Error::Precondition("gauge must be infinitesimal".into()));
            }
            if let Some(i) = (0..space.len()).find(|&i| !resonant[i] && !sigma.values()[i].is_zero()) {
                return Err(Error::Precondition(format!(
                    "gauge must vanish on nonresonant word {}",
                    space.word_at(i)
                )));
            }
        }
        let b = beta.values();
        let mut kappa = CoeffMap::unit(space.alphabet(), space.order())?;
        let mut hat = vec![S::zero(); space.len()];
        for n in 1..=space.order() {
            let neutral = log_neutral_level(&kappa, n)?;
            let mut level = Vec::with_capacity(space.level_size(n));
            for rank in 0..space.level_size(n) {
                let idx = space.index_of_rank(n, rank);
                let known = b[idx].clone() + proper_split_sum(&space, n, rank, kappa.values(), b)
                    - proper_split_sum(&space, n, rank, &hat, kappa.values());
                if resonant[idx] {
                    let gauge = sigma.map(|s| s.values()[idx].clone()).unwrap_or_else(S::zero);
                    level.push(neutral[rank].clone() + gauge);
                    hat[idx] = known;
                } else {
                    level.push(known / nus[idx].clone());
                }
            }
            let start = space.index_of_rank(n, 0);
            let mut values = kappa.values().to_vec();
            values[start..start + level.len()].clone_from_slice(&level);
            kappa = CoeffMap::from_values(space.alphabet(), space.order(), values)?;
        }
        Ok(NormalFormResult {
            v: v.clone(),
            kappa,
            beta_hat: CoeffMap::from_values(space.alphabet(), space.order(), hat)?,
            order: space.order(),
            resonant,
        })
    }

    /// `beta_hat ⋆ kappa - kappa ⋆ beta + xi_v kappa`.
    pub fn normal_form_residual<S: Scalar>(
        &self,
        result: &NormalFormResult<S>,
        beta: &CoeffMap<S>,
    ) -> Result<CoeffMap<S>> {
        result
            .beta_hat
            .convolve(&result.kappa)?
            .sub(&result.kappa.convolve(beta)?)?
            .add(&self.small_xi(&result.v, &result.kappa)?)
    }

    pub fn check_normal_form<S: Scalar>(
        &self,
        result: &NormalFormResult<S>,
        beta: &CoeffMap<S>,
    ) -> Result<NormalFormReport> {
        let residual = self.normal_form_residual(result, beta)?;
        let space = residual.space();
        let resonant = self.resonant_flags(&result.v, &space)?;
        let scale = 1.0f64.max(beta.max_abs()).max(result.kappa.max_abs());
        let residual_violations = residual
            .iter()
            .filter(|(_, c)| !negligible_at(*c, scale))
            .map(|(w, _)| w)
            .collect();
        let support_violations = result
            .beta_hat
            .iter()
            .enumerate()
            .filter(|(i, (_, c))| !resonant[*i] && !c.is_negligible())
            .map(|(_, (w, _))| w)
            .collect();
        Ok(NormalFormReport {
            residual_violations,
            support_violations,
            kappa_is_character: result.kappa.is_character(),
            hat_in_class: result.beta_hat.is_infinitesimal(),
            max_residual: residual.max_abs(),
        })
    }

    /// `kappa~ = delta ⋆ kappa`, `beta_hat~ = delta ⋆ beta_hat ⋆ delta^{-1}`
    /// for a character `delta` with `xi_v delta = 0`.
    pub fn gauge_transform<S: Scalar>(
        &self,
        result: &NormalFormResult<S>,
        delta: &CoeffMap<S>,
    ) -> Result<NormalFormResult<S>> {
        if !delta.is_character() {
            return Err(Error::Precondition("gauge transform requires a character".into()));
        }
        let xi = self.small_xi(&result.v, delta)?;
        if let Some((w, _)) = xi.iter().find(|(_, c)| !c.is_negligible()) {
            return Err(Error::Precondition(format!("xi_v delta does not vanish at word {w}")));
        }
        Ok(NormalFormResult {
            v: result.v.clone(),
            kappa: delta.convolve(&result.kappa)?,
            beta_hat: delta.convolve(&result.beta_hat)?.convolve(&delta.inverse()?)?,
            order: result.order.min(delta.order()),
            resonant: result.resonant.clone(),
        })
    }
}

impl<S: Scalar> NormalFormResult<S> {
    pub fn resonant_word_count(&self) -> usize {
        self.resonant.iter().skip(1).filter(|&&r| r).count()
    }

    /// Nonempty resonant words in canonical order.
    pub fn resonant_words(&self) -> Vec<Word> {
        let space = self.kappa.space();
        (1..space.len()).filter(|&i| self.resonant[i]).map(|i| space.word_at(i)).collect()
    }

    pub fn metadata(&self) -> Value {
        json!({
            "v": self.v.to_json(),
            "resonant_word_count": self.resonant_word_count(),
            "gauge": DEFAULT_GAUGE,
            "order": self.order,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_infinitesimal, random_map};
    use crate::scalar::{gaussian, GaussianRational};
    use num_complex::Complex64;
    use num_traits::Zero;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type Q = GaussianRational;

    fn toy() -> FreqTable {
        // letters 0, k, -k with k = (1, 2)
        FreqTable::imaginary_from_ints(2, &[vec![0, 0], vec![1, 2], vec![-1, -2]]).unwrap()
    }

    #[test]
    fn zero_beta_gives_identity() {
        let t = toy();
        let beta = CoeffMap::<Q>::zero(3, 4).unwrap();
        let r = t.normal_form(&FreqVector::from_ints(&[1, 1]), &beta).unwrap();
        assert_eq!(r.kappa, CoeffMap::unit(3, 4).unwrap());
        assert!(r.beta_hat.is_zero());
    }

    #[test]
    fn nonresonant_model_has_trivial_normal_form() {
        // single letter with nonzero frequency: only the empty word resonates
        let t = FreqTable::imaginary_from_ints(1, &[vec![1]]).unwrap();
        let beta = CoeffMap::<Q>::letters_indicator(1, 5).unwrap();
        let r = t.normal_form(&FreqVector::from_ints(&[1]), &beta).unwrap();
        assert!(r.beta_hat.is_zero());
        assert!(t.check_normal_form(&r, &beta).unwrap().passed());
    }

    #[test]
    fn resonant_toy_model_exact() {
        let t = toy();
        let beta = CoeffMap::<Q>::letters_indicator(3, 5).unwrap();
        let r = t.normal_form(&FreqVector::from_ints(&[1, 1]), &beta).unwrap();
        let report = t.check_normal_form(&r, &beta).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.max_residual, 0.0);
        // beta_hat_0 = 1 and beta_hat at a resonant pair is nonzero
        assert_eq!(r.beta_hat[&Word::letter(0)], gaussian(1, 0));
        assert!(!r.beta_hat[&Word::from_letters([1, 2])].is_zero());
    }

    #[test]
    fn order_two_by_hand() {
        // letters 0 and k with nu_0 = 0, nu_k = nu; beta = letters indicator
        let nu = gaussian(0, 3);
        let t = FreqTable::new(1, vec![vec![gaussian(0, 0)], vec![nu.clone()]]).unwrap();
        let beta = CoeffMap::<Q>::letters_indicator(2, 2).unwrap();
        let r = t.normal_form(&FreqVector::from_ints(&[1]), &beta).unwrap();
        let k = Word::letter(1);
        assert_eq!(r.kappa[&k], gaussian(1, 0) / nu.clone());
        // kappa_{0k}: known = kappa_0 beta_k - beta_hat_0 kappa_k = -1/nu
        assert_eq!(r.kappa[&Word::from_letters([0, 1])], -(gaussian(1, 0) / (nu.clone() * nu.clone())));
        assert!(t.check_normal_form(&r, &beta).unwrap().passed());
    }

    #[test]
    fn random_infinitesimal_normal_forms_float_and_exact() {
        let t = toy();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..4 {
            let beta: CoeffMap<Q> = random_infinitesimal(3, 4, &mut rng).unwrap();
            let r = t.normal_form(&FreqVector::from_ints(&[2, -1]), &beta).unwrap();
            assert!(t.check_normal_form(&r, &beta).unwrap().passed());
            let bf = beta.to_float();
            let v = FreqVector::Generic(vec![Complex64::new(1.0, 0.0), Complex64::new(2f64.sqrt(), 0.0)]);
            let rf = t.normal_form(&v, &bf).unwrap();
            assert!(t.check_normal_form(&rf, &bf).unwrap().passed());
        }
    }

    #[test]
    fn custom_gauge_and_transform() {
        let t = toy();
        let v = FreqVector::from_ints(&[1, 1]);
        let beta = CoeffMap::<Q>::letters_indicator(3, 4).unwrap();
        let base = t.normal_form(&v, &beta).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let sigma: CoeffMap<Q> = random_infinitesimal::<Q, _>(3, 4, &mut rng)
            .unwrap()
            .restrict(|w| t.nu_word(&v, w).unwrap().is_zero);
        let other = t.normal_form_with_gauge(&v, &beta, Some(&sigma)).unwrap();
        assert!(t.check_normal_form(&other, &beta).unwrap().passed());
        let delta = other.kappa.convolve(&base.kappa.inverse().unwrap()).unwrap();
        assert!(t.small_xi(&v, &delta).unwrap().is_zero());
        let moved = t.gauge_transform(&base, &delta).unwrap();
        assert_eq!(moved.kappa, other.kappa);
        assert_eq!(moved.beta_hat, other.beta_hat);
    }

    #[test]
    fn gauge_transform_rejects_nonresonant_delta() {
        let t = toy();
        let v = FreqVector::from_ints(&[1, 1]);
        let beta = CoeffMap::<Q>::letters_indicator(3, 3).unwrap();
        let r = t.normal_form(&v, &beta).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let delta = crate::random::random_character::<Q, _>(3, 3, &mut rng).unwrap();
        assert!(t.gauge_transform(&r, &delta).is_err());
        let junk: CoeffMap<Q> = random_map(3, 3, &mut rng).unwrap();
        assert!(t.gauge_transform(&r, &junk).is_err());
    }
}
