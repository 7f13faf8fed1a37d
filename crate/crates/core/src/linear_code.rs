//! Random systematic binary linear block codes.
//!
//! A code is built as `G = [I_k | P]` with `P` drawn i.i.d. uniform from a
//! seeded generator, and `H = [P^T | I_{n-k}]`. Syndromes are packed into
//! `u64` words so a GRAND query touches only the columns of `H` it flips.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::{check_len, words_for, BitBlock};
use crate::error::{Error, Result};

/// A packed parity-check syndrome of `n - k` bits.
pub type Syndrome = Vec<u64>;

/// An (n, k) systematic linear block code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeSpec {
    n: usize,
    k: usize,
    seed: u64,
    generator: Vec<BitBlock>,
    parity_check: Vec<BitBlock>,
    /// Column `j` of `H`, packed, `syndrome_words` words per column.
    columns: Vec<u64>,
    syndrome_words: usize,
}

/// Generates a systematic random code. The parity part depends only on
/// `(n, k, seed)`.
pub fn generate_code(n: usize, k: usize, seed: u64) -> Result<CodeSpec> {
    if k == 0 || n == 0 || k > n {
        return Err(Error::InvalidDimensions { n, k });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = n - k;
    let mut parity = vec![BitBlock::zeros(r); k];
    for row in parity.iter_mut() {
        for j in 0..r {
            if rng.random::<bool>() {
                row.set(j, true);
            }
        }
    }
    Ok(CodeSpec::from_parity_part(n, k, seed, &parity))
}

impl CodeSpec {
    fn from_parity_part(n: usize, k: usize, seed: u64, parity: &[BitBlock]) -> Self {
        let r = n - k;
        let mut generator = Vec::with_capacity(k);
        for (i, p) in parity.iter().enumerate() {
            let mut row = BitBlock::zeros(n);
            row.set(i, true);
            for j in 0..r {
                if p.get(j) {
                    row.set(k + j, true);
                }
            }
            generator.push(row);
        }
        let mut parity_check = Vec::with_capacity(r);
        for j in 0..r {
            let mut row = BitBlock::zeros(n);
            for (i, p) in parity.iter().enumerate() {
                if p.get(j) {
                    row.set(i, true);
                }
            }
            row.set(k + j, true);
            parity_check.push(row);
        }
        let syndrome_words = words_for(r).max(1);
        let mut columns = vec![0u64; n * syndrome_words];
        for (j, row) in parity_check.iter().enumerate() {
            for col in 0..n {
                if row.get(col) {
                    columns[col * syndrome_words + j / 64] |= 1u64 << (j % 64);
                }
            }
        }
        Self {
            n,
            k,
            seed,
            generator,
            parity_check,
            columns,
            syndrome_words,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    /// Rows of the k x n generator matrix.
    pub fn generator(&self) -> &[BitBlock] {
        &self.generator
    }

    /// Rows of the (n - k) x n parity-check matrix.
    pub fn parity_check(&self) -> &[BitBlock] {
        &self.parity_check
    }

    pub fn syndrome_words(&self) -> usize {
        self.syndrome_words
    }

    /// Packed column `pos` of `H`.
    #[inline]
    pub fn column(&self, pos: usize) -> &[u64] {
        let w = self.syndrome_words;
        &self.columns[pos * w..(pos + 1) * w]
    }

    /// `info * G` over GF(2).
    pub fn encode(&self, info: &BitBlock) -> Result<BitBlock> {
        check_len(info.len(), self.k)?;
        let mut out = BitBlock::zeros(self.n);
        for (i, row) in self.generator.iter().enumerate() {
            if info.get(i) {
                out.xor_assign(row)?;
            }
        }
        Ok(out)
    }

    /// `H * word^T`, packed.
    pub fn syndrome(&self, word: &BitBlock) -> Result<Syndrome> {
        check_len(word.len(), self.n)?;
        let mut s = vec![0u64; self.syndrome_words];
        for pos in 0..self.n {
            if word.get(pos) {
                for (a, b) in s.iter_mut().zip(self.column(pos)) {
                    *a ^= b;
                }
            }
        }
        Ok(s)
    }

    pub fn is_codeword(&self, word: &BitBlock) -> Result<bool> {
        Ok(self.syndrome(word)?.iter().all(|&w| w == 0))
    }

    /// Writes the generator matrix, one row of `0`/`1` characters per line,
    /// preceded by a `#` header carrying `n k seed`.
    pub fn to_matrix_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# n={} k={} seed={}", self.n, self.k, self.seed);
        for row in &self.generator {
            let _ = writeln!(out, "{row}");
        }
        out
    }

    /// Parses the format written by [`CodeSpec::to_matrix_text`]. The
    /// generator must be systematic.
    pub fn from_matrix_text(text: &str) -> Result<Self> {
        let mut seed = 0u64;
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('#') {
                for field in header.split_whitespace() {
                    if let Some(v) = field.strip_prefix("seed=") {
                        seed = v.parse().map_err(|_| {
                            Error::Parse(format!("line {}: bad seed {v:?}", lineno + 1))
                        })?;
                    }
                }
                continue;
            }
            let row = BitBlock::parse(line)
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            rows.push(row);
        }
        let k = rows.len();
        let n = rows.first().map_or(0, BitBlock::len);
        if k == 0 || n < k {
            return Err(Error::InvalidDimensions { n, k });
        }
        let mut parity = Vec::with_capacity(k);
        for (i, row) in rows.iter().enumerate() {
            check_len(row.len(), n)?;
            for j in 0..k {
                if row.get(j) != (i == j) {
                    return Err(Error::Parse(format!(
                        "generator row {} is not in systematic form",
                        i + 1
                    )));
                }
            }
            let mut p = BitBlock::zeros(n - k);
            for j in 0..n - k {
                if row.get(k + j) {
                    p.set(j, true);
                }
            }
            parity.push(p);
        }
        Ok(Self::from_parity_part(n, k, seed, &parity))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_matrix_text())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_matrix_text(&std::fs::read_to_string(path)?)
    }
}

pub fn encode(info: &BitBlock, code: &CodeSpec) -> Result<BitBlock> {
    code.encode(info)
}

pub fn is_codeword(word: &BitBlock, code: &CodeSpec) -> Result<bool> {
    code.is_codeword(word)
}
