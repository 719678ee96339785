//! Words over the alphabet `{1, ..., d}` and the basis bookkeeping for the
//! truncated Fock space: basis vectors are indexed by words ordered first by
//! length, then lexicographically, with the first letter the slowest-varying
//! digit.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A word over `{1, ..., d}`; the empty word is the degree-zero basis vector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Builds a word from 1-based letters, validating them against `d`.
    pub fn new(letters: &[u8], d: usize) -> Result<Self> {
        for &l in letters {
            if l == 0 || l as usize > d {
                return Err(Error::LetterOutOfRange { letter: l, d });
            }
        }
        Ok(Word(letters.to_vec()))
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The word `l . self`.
    pub fn prepend(&self, l: u8) -> Self {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(l);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    /// Position of this word among the words of the same length, reading the
    /// letters as base-`d` digits with the first letter most significant.
    pub fn index_within_level(&self, d: usize) -> usize {
        let mut idx = 0usize;
        for &l in &self.0 {
            idx = idx * d + (l as usize - 1);
        }
        idx
    }

    /// The `idx`-th word of length `k` (inverse of [`index_within_level`]).
    ///
    /// [`index_within_level`]: Word::index_within_level
    pub fn from_index(d: usize, k: usize, idx: usize) -> Self {
        let mut letters = alloc::vec![0u8; k];
        let mut rest = idx;
        for pos in (0..k).rev() {
            letters[pos] = (rest % d) as u8 + 1;
            rest /= d;
        }
        Word(letters)
    }
}

/// `d^k` with an overflow/scale guard.
pub fn level_dim(d: usize, k: usize) -> Result<usize> {
    let mut acc = 1usize;
    for _ in 0..k {
        acc = acc
            .checked_mul(d)
            .ok_or_else(|| Error::DimensionTooLarge(format!("d^k overflows for d={d}, k={k}")))?;
    }
    Ok(acc)
}

/// Offset of the length-`k` level inside the truncated space:
/// `1 + d + ... + d^(k-1)`.
pub fn level_offset(d: usize, k: usize) -> Result<usize> {
    let mut acc = 0usize;
    let mut pow = 1usize;
    for _ in 0..k {
        acc = acc
            .checked_add(pow)
            .ok_or_else(|| Error::DimensionTooLarge(format!("level offset overflows for d={d}, k={k}")))?;
        pow = pow
            .checked_mul(d)
            .ok_or_else(|| Error::DimensionTooLarge(format!("level offset overflows for d={d}, k={k}")))?;
    }
    Ok(acc)
}

/// Dimension of the truncated space: `1 + d + ... + d^K`.
pub fn space_dim(d: usize, max_level: usize) -> Result<usize> {
    let last = level_dim(d, max_level)?;
    let off = level_offset(d, max_level)?;
    off.checked_add(last)
        .ok_or_else(|| Error::DimensionTooLarge(format!("space dimension overflows for d={d}, K={max_level}")))
}

/// All words of length `k` in basis order.
pub fn words_of_length(d: usize, k: usize) -> Result<Vec<Word>> {
    let n = level_dim(d, k)?;
    Ok((0..n).map(|i| Word::from_index(d, k, i)).collect())
}
