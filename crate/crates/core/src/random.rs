//! Seeded generators of random coefficient families for property suites.

use num_complex::Complex;
use num_rational::BigRational;
use rand::Rng;

use crate::coeff::CoeffMap;
use crate::error::Result;
use crate::scalar::{GaussianRational, Scalar};
use crate::word::{Letter, Word, WordSpace};

/// Small random Gaussian rational with numerators in `[-5, 5]` and
/// denominators in `[1, 4]`.
pub fn random_gaussian<R: Rng + ?Sized>(rng: &mut R) -> GaussianRational {
    let part = |rng: &mut R| BigRational::new(rng.gen_range(-5i64..=5).into(), rng.gen_range(1i64..=4).into());
    let re = part(rng);
    let im = part(rng);
    Complex::new(re, im)
}

pub fn random_scalar<S: Scalar, R: Rng + ?Sized>(rng: &mut R) -> S {
    S::from_gaussian(&random_gaussian(rng))
}

/// Arbitrary random coefficient map (no shuffle structure).
pub fn random_map<S: Scalar, R: Rng + ?Sized>(alphabet: usize, order: usize, rng: &mut R) -> Result<CoeffMap<S>> {
    CoeffMap::from_fn(alphabet, order, |_| random_scalar(rng))
}

/// Expansion of the left-nested commutator `[[..[l1, l2], ..], ln]` as an
/// integer combination of words.
pub fn left_nested_commutator(word: &Word) -> Vec<(Word, i64)> {
    let mut letters = word.letters().iter();
    let Some(&first) = letters.next() else {
        return Vec::new();
    };
    let mut poly = vec![(Word::from_iter([first]), 1i64)];
    for &l in letters {
        let single = Word::from_iter([l]);
        let mut next = Vec::with_capacity(poly.len() * 2);
        for (w, c) in &poly {
            next.push((w.concat(&single), *c));
            next.push((w.prepend(l), -*c));
        }
        poly = merge_terms(next);
    }
    poly
}

fn merge_terms(mut terms: Vec<(Word, i64)>) -> Vec<(Word, i64)> {
    terms.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out: Vec<(Word, i64)> = Vec::with_capacity(terms.len());
    for (w, c) in terms {
        match out.last_mut() {
            Some((last, acc)) if *last == w => *acc += c,
            _ => out.push((w, c)),
        }
    }
    out.retain(|(_, c)| *c != 0);
    out
}

/// Random infinitesimal character: a random combination of left-nested
/// commutators of letters, one per word of each length.
pub fn random_infinitesimal<S: Scalar, R: Rng + ?Sized>(
    alphabet: usize,
    order: usize,
    rng: &mut R,
) -> Result<CoeffMap<S>> {
    let space = WordSpace::new(alphabet, order)?;
    let mut values = vec![S::zero(); space.len()];
    for word in space.words().skip(1) {
        // sparse in the higher levels so that low-order terms are not drowned
        if word.len() > 1 && rng.gen_bool(0.5) {
            continue;
        }
        let c: S = random_scalar(rng);
        if c.is_zero() {
            continue;
        }
        for (w, k) in left_nested_commutator(&word) {
            let i = space.index(&w)?;
            values[i] = values[i].clone() + c.clone() * S::from_i64(k);
        }
    }
    CoeffMap::from_values(alphabet, order, values)
}

pub fn random_character<S: Scalar, R: Rng + ?Sized>(alphabet: usize, order: usize, rng: &mut R) -> Result<CoeffMap<S>> {
    random_infinitesimal::<S, R>(alphabet, order, rng)?.exp_star()
}

/// Letter-indexed random vector, used for per-letter exponent tables.
pub fn random_letters<S: Scalar, R: Rng + ?Sized>(alphabet: usize, rng: &mut R) -> Vec<S> {
    (0..alphabet).map(|_| random_scalar(rng)).collect()
}

pub fn letter(l: usize) -> Letter {
    Letter(l as u16)
}
