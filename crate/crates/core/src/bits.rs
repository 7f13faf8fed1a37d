//! Word-packed binary vectors over GF(2).

use std::fmt;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

#[inline]
pub(crate) fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

/// A fixed-length binary vector, packed 64 bits per word (bit `i` lives in
/// word `i / 64` at position `i % 64`).
///
/// Used for information words, codewords, hard decisions and noise patterns.
/// Bits past `len` in the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitBlock {
    words: Vec<u64>,
    len: usize,
}

impl BitBlock {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; words_for(len)],
            len,
        }
    }

    /// Builds a block from `0`/`1` bytes.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut block = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => block.set(i, true),
                other => return Err(Error::InvalidBit(other)),
            }
        }
        Ok(block)
    }

    /// Parses a string of `'0'`/`'1'` characters.
    pub fn parse(text: &str) -> Result<Self> {
        let bits: Vec<u8> = text
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Parse(format!("unexpected character {c:?} in bit string"))),
            })
            .collect::<Result<_>>()?;
        Self::from_bits(&bits)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// In-place XOR with another block of the same length.
    pub fn xor_assign(&mut self, other: &BitBlock) -> Result<()> {
        check_len(other.len, self.len)?;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    /// Parity of the bitwise AND, i.e. the GF(2) inner product.
    pub fn dot(&self, other: &BitBlock) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    /// The first `len` bits as a new block.
    pub fn prefix(&self, len: usize) -> BitBlock {
        assert!(len <= self.len);
        let mut out = BitBlock::zeros(len);
        let full = len / WORD_BITS;
        out.words[..full].copy_from_slice(&self.words[..full]);
        let rem = len % WORD_BITS;
        if rem != 0 {
            out.words[full] = self.words[full] & ((1u64 << rem) - 1);
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Bits as `0`/`1` bytes.
    pub fn to_bits(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }

    /// Positions of set bits, ascending.
    pub fn ones(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.get(i)).collect()
    }
}

impl fmt::Display for BitBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitBlock({self})")
    }
}

pub(crate) fn check_len(actual: usize, expected: usize) -> Result<()> {
    if actual == expected {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, actual })
    }
}
