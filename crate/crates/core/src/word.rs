//! Letters, words and the canonical length-then-lex word index.

use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Hard cap on the number of words a dense coefficient table may hold.
pub const MAX_WORDS: u128 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Letter(pub u16);

impl Letter {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A finite sequence of letters; the empty word is allowed.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(SmallVec<[Letter; 8]>);

impl Word {
    pub fn empty() -> Self {
        Word(SmallVec::new())
    }

    pub fn from_letters<I: IntoIterator<Item = usize>>(letters: I) -> Self {
        Word(letters.into_iter().map(|l| Letter(l as u16)).collect())
    }

    pub fn letter(l: usize) -> Self {
        Self::from_letters([l])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        out.extend_from_slice(&other.0);
        Word(out)
    }

    pub fn prepend(&self, letter: Letter) -> Word {
        let mut out = SmallVec::with_capacity(self.len() + 1);
        out.push(letter);
        out.extend_from_slice(&self.0);
        Word(out)
    }

    pub fn slice(&self, start: usize, end: usize) -> Word {
        Word(self.0[start..end].iter().copied().collect())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("()");
        }
        f.write_str("(")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", l.0)?;
        }
        f.write_str(")")
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

/// All words of length at most `order` over an alphabet of `alphabet` letters,
/// enumerated by length and then lexicographically.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WordSpace {
    alphabet: usize,
    order: usize,
}

impl WordSpace {
    pub fn new(alphabet: usize, order: usize) -> Result<Self> {
        if alphabet == 0 {
            return Err(Error::Precondition("alphabet must be nonempty".into()));
        }
        let total: u128 = (0..=order as u32).map(|k| (alphabet as u128).saturating_pow(k)).sum();
        if total > MAX_WORDS {
            return Err(Error::WordCap { words: total, order });
        }
        Ok(WordSpace { alphabet, order })
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `alphabet^n`.
    pub fn level_size(&self, n: usize) -> usize {
        self.alphabet.pow(n as u32)
    }

    /// Index of the first word of length `n`.
    pub fn offset(&self, n: usize) -> usize {
        (0..n).map(|k| self.level_size(k)).sum()
    }

    pub fn len(&self) -> usize {
        self.offset(self.order + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, word: &Word) -> Result<usize> {
        if word.len() > self.order {
            return Err(Error::TruncationOverflow { length: word.len(), order: self.order });
        }
        let mut rank = 0usize;
        for l in word.letters() {
            if l.index() >= self.alphabet {
                return Err(Error::LetterOutOfRange { letter: l.index(), alphabet: self.alphabet });
            }
            rank = rank * self.alphabet + l.index();
        }
        Ok(self.offset(word.len()) + rank)
    }

    /// Index of the word of length `n` with lexicographic rank `rank`.
    pub fn index_of_rank(&self, n: usize, rank: usize) -> usize {
        self.offset(n) + rank
    }

    pub fn word_of_rank(&self, n: usize, mut rank: usize) -> Word {
        let mut letters = vec![0usize; n];
        for slot in letters.iter_mut().rev() {
            *slot = rank % self.alphabet;
            rank /= self.alphabet;
        }
        Word::from_letters(letters)
    }

    pub fn word_at(&self, index: usize) -> Word {
        let mut n = 0;
        let mut start = 0;
        while start + self.level_size(n) <= index {
            start += self.level_size(n);
            n += 1;
        }
        self.word_of_rank(n, index - start)
    }

    pub fn words(&self) -> impl Iterator<Item = Word> + '_ {
        (0..=self.order).flat_map(move |n| self.level(n))
    }

    pub fn level(&self, n: usize) -> impl Iterator<Item = Word> + '_ {
        (0..self.level_size(n)).map(move |r| self.word_of_rank(n, r))
    }

    /// Ranks of the prefix of length `j` and the complementary suffix of the
    /// word of length `n` with rank `rank`.
    pub fn split_rank(&self, n: usize, rank: usize, j: usize) -> (usize, usize) {
        let tail = self.level_size(n - j);
        (rank / tail, rank % tail)
    }
}

/// All riffle interleavings of `w` and `w2`, with multiplicity.
pub fn shuffle(w: &Word, w2: &Word, max_len: usize) -> Result<Vec<Word>> {
    let length = w.len() + w2.len();
    if length > max_len {
        return Err(Error::TruncationOverflow { length, order: max_len });
    }
    let mut out = Vec::new();
    let mut buf = Vec::with_capacity(length);
    riffle(w.letters(), w2.letters(), &mut buf, &mut out);
    Ok(out)
}

fn riffle(a: &[Letter], b: &[Letter], buf: &mut Vec<Letter>, out: &mut Vec<Word>) {
    if a.is_empty() || b.is_empty() {
        let mut word = buf.clone();
        word.extend_from_slice(a);
        word.extend_from_slice(b);
        out.push(word.into_iter().collect());
        return;
    }
    buf.push(a[0]);
    riffle(&a[1..], b, buf, out);
    buf.pop();
    buf.push(b[0]);
    riffle(a, &b[1..], buf, out);
    buf.pop();
}

pub fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::from_letters(s.bytes().map(|b| (b - b'a') as usize))
    }

    fn sorted(mut v: Vec<Word>) -> Vec<Word> {
        v.sort();
        v
    }

    #[test]
    fn shuffle_with_empty_word_is_identity() {
        assert_eq!(shuffle(&Word::empty(), &w("ab"), 4).unwrap(), vec![w("ab")]);
    }

    #[test]
    fn shuffle_two_letters() {
        assert_eq!(sorted(shuffle(&w("a"), &w("b"), 4).unwrap()), vec![w("ab"), w("ba")]);
    }

    #[test]
    fn shuffle_ab_c() {
        assert_eq!(
            sorted(shuffle(&w("ab"), &w("c"), 4).unwrap()),
            vec![w("abc"), w("acb"), w("cab")]
        );
    }

    #[test]
    fn shuffle_overflow() {
        assert!(matches!(
            shuffle(&w("ab"), &w("cd"), 3),
            Err(Error::TruncationOverflow { length: 4, order: 3 })
        ));
    }

    #[test]
    fn shuffle_counts_are_binomial() {
        for (a, b) in [("abc", "de"), ("aa", "aa"), ("abcd", "e")] {
            let s = shuffle(&w(a), &w(b), 8).unwrap();
            assert_eq!(s.len() as u128, binomial(a.len() + b.len(), a.len()));
        }
    }

    #[test]
    fn index_roundtrip_in_canonical_order() {
        let space = WordSpace::new(3, 3).unwrap();
        assert_eq!(space.len(), 1 + 3 + 9 + 27);
        for (i, word) in space.words().enumerate() {
            assert_eq!(space.index(&word).unwrap(), i);
            assert_eq!(space.word_at(i), word);
        }
        assert_eq!(space.word_at(4), w("aa"));
        assert_eq!(space.word_at(5), w("ab"));
    }

    #[test]
    fn word_cap_enforced() {
        assert!(WordSpace::new(10, 5).is_ok());
        assert!(matches!(WordSpace::new(10, 6), Err(Error::WordCap { .. })));
    }

    #[test]
    fn split_rank_matches_slicing() {
        let space = WordSpace::new(3, 4).unwrap();
        for word in space.level(4) {
            let rank = space.index(&word).unwrap() - space.offset(4);
            for j in 0..=4 {
                let (p, s) = space.split_rank(4, rank, j);
                assert_eq!(space.word_of_rank(j, p), word.slice(0, j));
                assert_eq!(space.word_of_rank(4 - j, s), word.slice(j, 4));
            }
        }
    }
}
