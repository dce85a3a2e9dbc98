//! Finite integer alphabets and probability mass functions over them.

use crate::error::{Error, Result};
use crate::math::{compensated_sum, entropy_bits, NORMALIZATION_TOLERANCE};

/// A contiguous alphabet of integer symbols `offset ..= offset + len − 1`.
///
/// Pixel alphabets start at 0; signed residual alphabets start below zero.
/// Keeping the offset explicit means residual distributions are first-class
/// values instead of index-shifted pixel distributions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Alphabet {
    offset: i32,
    len: usize,
}

impl Alphabet {
    pub fn new(offset: i32, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::invalid("alphabet size must be at least 1"));
        }
        if len > (1 << 20) {
            return Err(Error::invalid(format!(
                "alphabet size {len} exceeds the supported maximum of 2^20"
            )));
        }
        Ok(Alphabet { offset, len })
    }

    /// The n-bit-pixel style alphabet `{0 ..= n_max}`.
    pub fn pixel(n_max: u32) -> Result<Self> {
        Alphabet::new(0, n_max as usize + 1)
    }

    pub fn offset(&self) -> i32 {
        self.offset
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false // by construction: len >= 1
    }

    /// Largest symbol value.
    pub fn max_symbol(&self) -> i32 {
        self.offset + (self.len - 1) as i32
    }

    /// Symbol value at a given index. Panics on out-of-range indices, which
    /// indicate a bug rather than bad user input.
    pub fn symbol(&self, index: usize) -> i32 {
        debug_assert!(index < self.len);
        self.offset + index as i32
    }

    /// Index of a symbol value, if it lies in the alphabet.
    pub fn index_of(&self, symbol: i32) -> Option<usize> {
        if symbol < self.offset || symbol > self.max_symbol() {
            None
        } else {
            Some((symbol - self.offset) as usize)
        }
    }

    pub fn symbols(&self) -> impl Iterator<Item = i32> + '_ {
        (0..self.len).map(move |i| self.symbol(i))
    }
}

/// A probability mass function over an [`Alphabet`].
#[derive(Clone, Debug, PartialEq)]
pub struct Pmf {
    alphabet: Alphabet,
    probs: Vec<f64>,
}

impl Pmf {
    /// Builds a pmf, validating non-negativity and normalization (sum within
    /// [`NORMALIZATION_TOLERANCE`] of 1).
    pub fn new(alphabet: Alphabet, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != alphabet.len() {
            return Err(Error::invalid(format!(
                "pmf has {} entries for an alphabet of size {}",
                probs.len(),
                alphabet.len()
            )));
        }
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::invalid(format!(
                    "pmf entry {i} is {p}, expected a finite value >= 0"
                )));
            }
        }
        let total = compensated_sum(probs.iter().copied());
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::invalid(format!(
                "pmf sums to {total:.17}, more than {NORMALIZATION_TOLERANCE:.0e} away from 1"
            )));
        }
        Ok(Pmf { alphabet, probs })
    }

    /// Uniform distribution over `size` symbols starting at `offset`.
    pub fn uniform(size: usize, offset: i32) -> Result<Self> {
        let alphabet = Alphabet::new(offset, size)?;
        let p = 1.0 / size as f64;
        Ok(Pmf {
            alphabet,
            probs: vec![p; size],
        })
    }

    /// Internal constructor for distributions that are valid by construction
    /// (marginals of a validated joint, normalized random weights, ...).
    pub(crate) fn from_raw(alphabet: Alphabet, probs: Vec<f64>) -> Self {
        debug_assert_eq!(alphabet.len(), probs.len());
        Pmf { alphabet, probs }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, index: usize) -> f64 {
        self.probs[index]
    }

    /// Shannon entropy in bits; lies in `[0, log2(alphabet size)]`.
    pub fn entropy(&self) -> f64 {
        entropy_bits(self.probs.iter().copied())
    }
}
