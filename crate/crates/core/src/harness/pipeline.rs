//! Seeded end-to-end Monte-Carlo trials.

use rand::Rng;

use crate::bits::BitBlock;
use crate::channel::{self, substream_rng, LlrBlock, Substream};
use crate::error::Result;
use crate::linear_code::CodeSpec;
use crate::metrics::{self, HardwareProfile};
use crate::orbgrand::{decode_with, DecoderCore};
use crate::scheduler::{self, ScheduleConfig, SimOutcome, TraceEvent};

/// Information words and codewords for `trials` codewords. Trial `i` draws
/// its information bits and its noise from substreams keyed by
/// `(master_seed, i)`, so every configuration and every `Eb/N0` sees the same
/// underlying standard-normal noise for a given trial.
#[derive(Clone, Debug)]
pub struct TrialBank {
    master_seed: u64,
    info: Vec<BitBlock>,
    codewords: Vec<BitBlock>,
}

impl TrialBank {
    pub fn new(code: &CodeSpec, master_seed: u64, trials: usize) -> Result<Self> {
        let mut info = Vec::with_capacity(trials);
        let mut codewords = Vec::with_capacity(trials);
        for i in 0..trials as u64 {
            let mut rng = substream_rng(master_seed, i, Substream::Info);
            let mut word = BitBlock::zeros(code.k());
            for b in 0..code.k() {
                if rng.random::<bool>() {
                    word.set(b, true);
                }
            }
            codewords.push(code.encode(&word)?);
            info.push(word);
        }
        Ok(Self {
            master_seed,
            info,
            codewords,
        })
    }

    pub fn len(&self) -> usize {
        self.info.len()
    }

    pub fn is_empty(&self) -> bool {
        self.info.is_empty()
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn info_words(&self) -> &[BitBlock] {
        &self.info
    }

    pub fn codewords(&self) -> &[BitBlock] {
        &self.codewords
    }

    /// Received LLR blocks at `sigma2`, indexed by arrival order.
    pub fn llr_stream(&self, sigma2: f64) -> Result<Vec<LlrBlock>> {
        self.codewords
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let mut rng = substream_rng(self.master_seed, i as u64, Substream::Noise);
                let y = channel::transmit(&channel::modulate(c), sigma2, &mut rng)?;
                let mut block = channel::compute_llrs(&y, sigma2)?;
                block.arrival_index = i as u64;
                Ok(block)
            })
            .collect()
    }
}

/// Measurements of one decoder configuration at one noise level.
#[derive(Clone, Debug, PartialEq)]
pub struct PointMeasurement {
    pub trials: u64,
    pub errors: u64,
    /// Mean queries per codeword.
    pub beta: f64,
    pub active_cycles_total: u64,
    pub early_terminations: u64,
    /// Decoded words in arrival order.
    pub decoded: Vec<BitBlock>,
}

/// Unconstrained ORBGRAND on every block. A cap hit counts as an error.
pub fn run_unconstrained(code: &CodeSpec, bank: &TrialBank, stream: &[LlrBlock], query_cap: u64) -> Result<PointMeasurement> {
    let mut core = DecoderCore::new(code.n());
    let mut errors = 0;
    let mut queries = 0;
    let mut decoded = Vec::with_capacity(stream.len());
    for (block, info) in stream.iter().zip(bank.info_words()) {
        let r = decode_with(&mut core, block, code, query_cap)?;
        queries += r.queries_used;
        if !r.found || r.word.prefix(code.k()) != *info {
            errors += 1;
        }
        decoded.push(r.word);
    }
    Ok(PointMeasurement {
        trials: stream.len() as u64,
        errors,
        beta: queries as f64 / stream.len().max(1) as f64,
        active_cycles_total: 0,
        early_terminations: 0,
        decoded,
    })
}

/// GRAND with abandonment after `alpha * interval` queries per codeword. An
/// abandoned codeword outputs its hard decision.
pub fn run_grandab(code: &CodeSpec, bank: &TrialBank, stream: &[LlrBlock], alpha: u32, interval: u64) -> Result<PointMeasurement> {
    let budget = u64::from(alpha) * interval;
    let mut core = DecoderCore::new(code.n());
    let mut errors = 0;
    let mut queries = 0;
    let mut cycles = 0;
    let mut abandoned = 0;
    let mut decoded = Vec::with_capacity(stream.len());
    for (block, info) in stream.iter().zip(bank.info_words()) {
        let r = decode_with(&mut core, block, code, budget)?;
        queries += r.queries_used;
        cycles += r.queries_used.div_ceil(u64::from(alpha));
        if !r.found {
            abandoned += 1;
        }
        if r.word.prefix(code.k()) != *info {
            errors += 1;
        }
        decoded.push(r.word);
    }
    Ok(PointMeasurement {
        trials: stream.len() as u64,
        errors,
        beta: queries as f64 / stream.len().max(1) as f64,
        active_cycles_total: cycles,
        early_terminations: abandoned,
        decoded,
    })
}

/// The FIFO scheduling architecture.
pub fn run_fifo(
    code: &CodeSpec,
    bank: &TrialBank,
    stream: &[LlrBlock],
    schedule: ScheduleConfig,
    trace: bool,
) -> Result<(PointMeasurement, SimOutcome, Vec<TraceEvent>)> {
    let (outcome, events) = if trace {
        scheduler::simulate_traced(schedule, code, stream)?
    } else {
        (scheduler::simulate(schedule, code, stream)?, Vec::new())
    };
    let decoded: Vec<&BitBlock> = outcome.records.iter().map(|r| &r.decoded).collect();
    let errors = metrics::error_count(&decoded, bank.info_words())?;
    let m = PointMeasurement {
        trials: outcome.records.len() as u64,
        errors,
        beta: outcome.total_queries() as f64 / outcome.records.len().max(1) as f64,
        active_cycles_total: outcome.active_cycles_total,
        early_terminations: outcome.early_terminations(),
        decoded: outcome.records.iter().map(|r| r.decoded.clone()).collect(),
    };
    Ok((m, outcome, events))
}

/// Dynamic power of a measured run.
pub fn measured_power(m: &PointMeasurement, parallelism: u64, interval: u64, hw: &HardwareProfile) -> f64 {
    metrics::dynamic_power(m.active_cycles_total, parallelism, interval, m.trials, hw.p_dec)
}
