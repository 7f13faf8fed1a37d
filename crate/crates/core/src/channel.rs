//! BPSK over AWGN: modulation, noise, LLRs and hard decisions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bits::BitBlock;
use crate::error::{Error, Result};

/// Noise level of one operating point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelParams {
    pub ebn0_db: f64,
    pub sigma2: f64,
    pub rate: f64,
}

impl ChannelParams {
    pub fn new(ebn0_db: f64, rate: f64) -> Result<Self> {
        Ok(Self {
            ebn0_db,
            sigma2: ebn0_to_sigma2(ebn0_db, rate)?,
            rate,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }
}

/// Soft values for one received codeword, tagged with its position in the
/// input stream.
#[derive(Clone, Debug, PartialEq)]
pub struct LlrBlock {
    pub llrs: Vec<f64>,
    pub arrival_index: u64,
}

impl LlrBlock {
    pub fn new(llrs: Vec<f64>, arrival_index: u64) -> Self {
        Self { llrs, arrival_index }
    }

    pub fn len(&self) -> usize {
        self.llrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.llrs.is_empty()
    }

    pub fn hard_decision(&self) -> BitBlock {
        hard_demod(&self.llrs)
    }
}

/// Noise variance for a given `Eb/N0` (dB) and code rate: `1 / (rate * 10^(dB/10))`.
pub fn ebn0_to_sigma2(ebn0_db: f64, rate: f64) -> Result<f64> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::InvalidRate(rate));
    }
    Ok(1.0 / (rate * 10f64.powf(ebn0_db / 10.0)))
}

/// Inverse of [`ebn0_to_sigma2`].
pub fn sigma2_to_ebn0(sigma2: f64, rate: f64) -> Result<f64> {
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(Error::InvalidVariance(sigma2));
    }
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::InvalidRate(rate));
    }
    Ok(-10.0 * (rate * sigma2).log10())
}

/// Bit 0 maps to +1, bit 1 to -1.
pub fn modulate(codeword: &BitBlock) -> Vec<f64> {
    codeword.iter().map(|b| if b { -1.0 } else { 1.0 }).collect()
}

/// Adds i.i.d. zero-mean Gaussian noise of variance `sigma2`.
///
/// Each sample is drawn as `sigma * z` with `z` standard normal, so the same
/// generator state yields the same underlying `z` at every noise level.
pub fn transmit<R: Rng + ?Sized>(symbols: &[f64], sigma2: f64, rng: &mut R) -> Result<Vec<f64>> {
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(Error::InvalidVariance(sigma2));
    }
    let sigma = sigma2.sqrt();
    Ok(symbols
        .iter()
        .map(|x| x + sigma * rng.sample::<f64, _>(StandardNormal))
        .collect())
}

/// `2 y / sigma2`, element-wise.
pub fn compute_llrs(received: &[f64], sigma2: f64) -> Result<LlrBlock> {
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(Error::InvalidVariance(sigma2));
    }
    let scale = 2.0 / sigma2;
    Ok(LlrBlock::new(received.iter().map(|y| scale * y).collect(), 0))
}

/// Negative values map to 1; positive values and exact zero map to 0.
pub fn hard_demod(values: &[f64]) -> BitBlock {
    let mut out = BitBlock::zeros(values.len());
    for (i, &v) in values.iter().enumerate() {
        if v < 0.0 {
            out.set(i, true);
        }
    }
    out
}

/// Which per-codeword random substream to draw from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Substream {
    Info,
    Noise,
}

/// Independent generator for codeword `arrival_index`, so trial `i` draws the
/// same values regardless of batching or worker count.
pub fn substream_rng(master_seed: u64, arrival_index: u64, which: Substream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    let tag = match which {
        Substream::Info => 0,
        Substream::Noise => 1,
    };
    rng.set_stream(arrival_index.wrapping_mul(2).wrapping_add(tag));
    rng
}
