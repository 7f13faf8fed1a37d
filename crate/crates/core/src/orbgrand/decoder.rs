use crate::bits::{check_len, BitBlock};
use crate::channel::LlrBlock;
use crate::error::{Error, Result};
use crate::linear_code::{CodeSpec, Syndrome};

use super::pattern::PatternGenerator;

/// Bit positions sorted by reliability: `order()[r - 1]` is the position with
/// reliability rank `r` (rank 1 = smallest `|llr|`). Positions are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReliabilityPermutation {
    order: Vec<u32>,
}

impl ReliabilityPermutation {
    pub fn order(&self) -> &[u32] {
        &self.order
    }

    /// Position holding reliability rank `rank` (1-based).
    #[inline]
    pub fn position(&self, rank: u32) -> usize {
        self.order[rank as usize - 1] as usize
    }
}

/// Stable sort of positions by `|llr|` ascending; ties keep index order.
pub fn rank_positions(llrs: &LlrBlock) -> ReliabilityPermutation {
    let mut order = Vec::with_capacity(llrs.len());
    rank_into(&llrs.llrs, &mut order);
    ReliabilityPermutation { order }
}

fn rank_into(llrs: &[f64], order: &mut Vec<u32>) {
    order.clear();
    order.extend(0..llrs.len() as u32);
    // |x| is non-negative, so its IEEE bit pattern orders like the value
    order.sort_unstable_by_key(|&i| (llrs[i as usize].abs().to_bits(), i));
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoreStatus {
    Idle,
    Active,
    Done,
}

/// Output of one decoding job.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeResult {
    pub arrival_index: u64,
    pub word: BitBlock,
    pub queries_used: u64,
    pub cycles_active: u64,
    /// A codeword was found (false for early termination and abandonment).
    pub found: bool,
    pub early_terminated: bool,
}

/// One ORBGRAND decoder instance, modeled as testing `alpha` patterns per
/// clock cycle.
#[derive(Clone, Debug)]
pub struct DecoderCore {
    n: usize,
    status: CoreStatus,
    arrival_index: u64,
    order: Vec<u32>,
    hard_word: BitBlock,
    base_syndrome: Syndrome,
    generator: PatternGenerator,
    /// Columns of `H` in rank order, `words` words each.
    ranked_columns: Vec<u64>,
    /// `prefix[i]`: syndrome after flipping the first `i` parts of the current
    /// pattern, `words` words each.
    prefix: Vec<u64>,
    words: usize,
    queries_used: u64,
    cycles_active: u64,
    booked_slot: Option<usize>,
    /// Rank set of the successful pattern once `Done`.
    hit: Vec<u32>,
    found: bool,
}

impl DecoderCore {
    /// An idle core for codes of length `n`.
    pub fn new(n: usize) -> Self {
        Self {
            n,
            status: CoreStatus::Idle,
            arrival_index: 0,
            order: Vec::with_capacity(n),
            hard_word: BitBlock::zeros(n),
            base_syndrome: Vec::new(),
            generator: PatternGenerator::new(n),
            ranked_columns: Vec::new(),
            prefix: Vec::new(),
            words: 1,
            queries_used: 0,
            cycles_active: 0,
            booked_slot: None,
            hit: Vec::new(),
            found: false,
        }
    }

    /// Starts decoding `llrs`; the core must be idle.
    pub fn load(&mut self, llrs: &LlrBlock, code: &CodeSpec, slot: Option<usize>) -> Result<()> {
        if self.status != CoreStatus::Idle {
            return Err(state_error("load", self.status));
        }
        check_len(llrs.len(), code.n())?;
        check_len(llrs.len(), self.n)?;
        self.arrival_index = llrs.arrival_index;
        rank_into(&llrs.llrs, &mut self.order);
        self.hard_word = llrs.hard_decision();
        self.base_syndrome = code.syndrome(&self.hard_word)?;
        self.words = code.syndrome_words();
        self.ranked_columns.clear();
        for &pos in &self.order {
            self.ranked_columns.extend_from_slice(code.column(pos as usize));
        }
        self.prefix.clear();
        self.prefix.extend_from_slice(&self.base_syndrome);
        self.generator.reset();
        self.queries_used = 0;
        self.cycles_active = 0;
        self.booked_slot = slot;
        self.hit.clear();
        self.found = false;
        self.status = CoreStatus::Active;
        Ok(())
    }

    pub fn status(&self) -> CoreStatus {
        self.status
    }

    pub fn arrival_index(&self) -> u64 {
        self.arrival_index
    }

    pub fn hard_word(&self) -> &BitBlock {
        &self.hard_word
    }

    pub fn permutation(&self) -> ReliabilityPermutation {
        ReliabilityPermutation {
            order: self.order.clone(),
        }
    }

    pub fn queries_used(&self) -> u64 {
        self.queries_used
    }

    pub fn cycles_active(&self) -> u64 {
        self.cycles_active
    }

    pub fn booked_slot(&self) -> Option<usize> {
        self.booked_slot
    }

    /// Tests up to `limit` further patterns; stops at the first codeword.
    ///
    /// Consecutive patterns usually share a prefix of parts, so syndromes are
    /// kept per prefix and only the changed tail is recomputed.
    fn query(&mut self, limit: u64) -> u64 {
        let w = self.words;
        let mut tested = 0;
        while tested < limit {
            let Some((ranks, kept)) = self.generator.next_with_prefix() else {
                // every word has been tried; unreachable for a real code
                self.status = CoreStatus::Done;
                break;
            };
            tested += 1;
            let needed = (ranks.len() + 1) * w;
            if self.prefix.len() < needed {
                self.prefix.resize(needed, 0);
            }
            let hit = if w == 1 {
                let mut s = self.prefix[kept];
                for (i, &r) in ranks.iter().enumerate().skip(kept) {
                    s ^= self.ranked_columns[r as usize - 1];
                    self.prefix[i + 1] = s;
                }
                s == 0
            } else {
                for (i, &r) in ranks.iter().enumerate().skip(kept) {
                    let col = &self.ranked_columns[(r as usize - 1) * w..r as usize * w];
                    let (done, rest) = self.prefix.split_at_mut((i + 1) * w);
                    for ((dst, src), c) in rest[..w].iter_mut().zip(&done[i * w..]).zip(col) {
                        *dst = src ^ c;
                    }
                }
                self.prefix[ranks.len() * w..needed].iter().all(|&x| x == 0)
            };
            if hit {
                self.hit.clear();
                self.hit.extend_from_slice(ranks);
                self.found = true;
                self.status = CoreStatus::Done;
                break;
            }
        }
        self.queries_used += tested;
        tested
    }

    /// One clock cycle: up to `alpha` queries.
    ///
    /// `code` must be the code the core was loaded with.
    pub fn step(&mut self, alpha: u32, _code: &CodeSpec) -> Result<CoreStatus> {
        if self.status != CoreStatus::Active {
            return Err(state_error("step", self.status));
        }
        self.cycles_active += 1;
        self.query(u64::from(alpha));
        Ok(self.status)
    }

    /// Runs up to `max_cycles` cycles, stopping after the cycle that finds a
    /// codeword. Returns the cycles consumed; equivalent to calling
    /// [`DecoderCore::step`] that many times.
    pub fn run_cycles(&mut self, alpha: u32, _code: &CodeSpec, max_cycles: u64) -> Result<u64> {
        if self.status != CoreStatus::Active {
            return Err(state_error("run", self.status));
        }
        let budget = max_cycles.saturating_mul(u64::from(alpha));
        let tested = self.query(budget);
        let cycles = if self.status == CoreStatus::Done {
            tested.div_ceil(u64::from(alpha)).max(1)
        } else {
            max_cycles
        };
        self.cycles_active += cycles;
        Ok(cycles)
    }

    /// Collects the decoded word of a finished core, leaving it idle.
    pub fn take_result(&mut self) -> Result<DecodeResult> {
        if self.status != CoreStatus::Done {
            return Err(state_error("collect", self.status));
        }
        let mut word = self.hard_word.clone();
        for &r in &self.hit {
            word.flip(self.order[r as usize - 1] as usize);
        }
        self.status = CoreStatus::Idle;
        Ok(DecodeResult {
            arrival_index: self.arrival_index,
            word,
            queries_used: self.queries_used,
            cycles_active: self.cycles_active,
            found: self.found,
            early_terminated: false,
        })
    }

    /// Aborts an active decode and outputs the hard decision.
    pub fn terminate(&mut self) -> Result<DecodeResult> {
        if self.status != CoreStatus::Active {
            return Err(state_error("terminate", self.status));
        }
        self.status = CoreStatus::Idle;
        Ok(DecodeResult {
            arrival_index: self.arrival_index,
            word: self.hard_word.clone(),
            queries_used: self.queries_used,
            cycles_active: self.cycles_active,
            found: false,
            early_terminated: true,
        })
    }
}

fn state_error(action: &str, status: CoreStatus) -> Error {
    Error::Internal {
        cycle: 0,
        message: format!("cannot {action} a decoder core in state {status:?}"),
    }
}

pub fn step_core(core: &mut DecoderCore, alpha: u32, code: &CodeSpec) -> Result<CoreStatus> {
    core.step(alpha, code)
}

pub fn terminate_core(core: &mut DecoderCore) -> Result<DecodeResult> {
    core.terminate()
}

/// Default query cap for [`decode_unconstrained`].
pub const DEFAULT_QUERY_CAP: u64 = 10_000_000;

/// ORBGRAND without a cycle model: queries until a codeword is found or
/// `query_cap` patterns have been tested. A cap hit returns the hard
/// decision with `found = false`.
pub fn decode_unconstrained(llrs: &LlrBlock, code: &CodeSpec, query_cap: u64) -> Result<DecodeResult> {
    let mut core = DecoderCore::new(code.n());
    decode_with(&mut core, llrs, code, query_cap)
}

/// GRAND with abandonment after `budget` queries. Identical to
/// [`decode_unconstrained`] with `query_cap = budget`.
pub fn decode_grandab(llrs: &LlrBlock, code: &CodeSpec, budget: u64) -> Result<DecodeResult> {
    decode_unconstrained(llrs, code, budget)
}

/// Like [`decode_unconstrained`] but reuses `core`'s buffers.
pub fn decode_with(core: &mut DecoderCore, llrs: &LlrBlock, code: &CodeSpec, query_cap: u64) -> Result<DecodeResult> {
    if query_cap == 0 {
        return Err(Error::Config("query_cap must be at least 1".into()));
    }
    if core.status != CoreStatus::Idle {
        return Err(state_error("reuse", core.status));
    }
    core.load(llrs, code, None)?;
    core.query(query_cap);
    if core.status == CoreStatus::Done {
        core.take_result()
    } else {
        core.status = CoreStatus::Idle;
        Ok(DecodeResult {
            arrival_index: core.arrival_index,
            word: core.hard_word.clone(),
            queries_used: core.queries_used,
            cycles_active: 0,
            found: false,
            early_terminated: false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::modulate;
    use crate::linear_code::generate_code;

    fn block(llrs: &[f64]) -> LlrBlock {
        LlrBlock::new(llrs.to_vec(), 0)
    }

    #[test]
    fn ranking() {
        assert_eq!(rank_positions(&block(&[3.0, -1.0, 2.0])).order(), &[1, 2, 0]);
        assert_eq!(rank_positions(&block(&[1.0, 1.0])).order(), &[0, 1]);
        assert_eq!(rank_positions(&block(&[-1.0, 1.0, 0.5])).order(), &[2, 0, 1]);
    }

    fn noiseless(code: &CodeSpec) -> (BitBlock, LlrBlock) {
        let mut info = BitBlock::zeros(code.k());
        info.set(0, true);
        info.set(code.k() - 1, true);
        let c = code.encode(&info).unwrap();
        let llrs = modulate(&c).iter().map(|x| 4.0 * x).collect();
        (c, LlrBlock::new(llrs, 7))
    }

    #[test]
    fn noiseless_core_finishes_in_one_query() {
        let code = generate_code(32, 20, 1).unwrap();
        let (c, llrs) = noiseless(&code);
        let mut core = DecoderCore::new(32);
        core.load(&llrs, &code, Some(3)).unwrap();
        assert_eq!(core.step(4, &code).unwrap(), CoreStatus::Done);
        let r = core.take_result().unwrap();
        assert_eq!(r.word, c);
        assert_eq!(r.queries_used, 1);
        assert_eq!(r.cycles_active, 1);
        assert_eq!(r.arrival_index, 7);
        assert!(r.found);
        assert_eq!(core.status(), CoreStatus::Idle);
    }

    #[test]
    fn least_reliable_flip_found_on_second_query() {
        let code = generate_code(32, 20, 1).unwrap();
        let (c, mut llrs) = noiseless(&code);
        // position 5 becomes the least reliable and has the wrong sign
        llrs.llrs[5] *= -0.1;
        let mut core = DecoderCore::new(32);
        core.load(&llrs, &code, None).unwrap();
        assert_eq!(core.step(4, &code).unwrap(), CoreStatus::Done);
        assert_eq!(core.queries_used(), 2);
        assert_eq!(core.take_result().unwrap().word, c);
    }

    #[test]
    fn budget_accounting_and_termination() {
        let code = generate_code(64, 40, 2).unwrap();
        // all-negative tiny LLRs with a few strong ones: far from any codeword
        let llrs: Vec<f64> = (0..64).map(|i| if i % 3 == 0 { -0.01 * (i as f64 + 1.0) } else { 0.02 * (i as f64 + 1.0) }).collect();
        let llrs = LlrBlock::new(llrs, 0);
        let mut core = DecoderCore::new(64);
        core.load(&llrs, &code, Some(0)).unwrap();
        let hard = core.hard_word().clone();
        assert!(!code.is_codeword(&hard).unwrap());
        let mut c = 0;
        while c < 3 && core.step(4, &code).unwrap() == CoreStatus::Active {
            c += 1;
        }
        if core.status() == CoreStatus::Active {
            assert_eq!(core.queries_used(), 4 * 3);
            let r = core.terminate().unwrap();
            assert!(r.early_terminated);
            assert_eq!(r.word, hard);
            assert_eq!(r.queries_used, 12);
            assert!(!code.is_codeword(&r.word).unwrap());
            assert_eq!(core.status(), CoreStatus::Idle);
        }
    }

    #[test]
    fn stepping_idle_core_is_an_error() {
        let code = generate_code(8, 4, 1).unwrap();
        let mut core = DecoderCore::new(8);
        assert!(core.step(4, &code).is_err());
        assert!(core.terminate().is_err());
        assert!(core.take_result().is_err());
    }

    #[test]
    fn run_cycles_matches_stepping() {
        let code = generate_code(48, 36, 9).unwrap();
        for seed in 0..40u64 {
            let llrs: Vec<f64> = (0..48)
                .map(|i| {
                    let v = ((seed * 31 + i * 17) % 23) as f64 - 7.0;
                    if v == 0.0 { 0.3 } else { v / 5.0 }
                })
                .collect();
            let llrs = LlrBlock::new(llrs, seed);
            for max in [1u64, 3, 50] {
                let mut a = DecoderCore::new(48);
                let mut b = DecoderCore::new(48);
                a.load(&llrs, &code, None).unwrap();
                b.load(&llrs, &code, None).unwrap();
                let used = a.run_cycles(4, &code, max).unwrap();
                let mut stepped = 0;
                while stepped < max {
                    stepped += 1;
                    if b.step(4, &code).unwrap() == CoreStatus::Done {
                        break;
                    }
                }
                assert_eq!(used, stepped);
                assert_eq!(a.status(), b.status());
                assert_eq!(a.queries_used(), b.queries_used());
                assert_eq!(a.cycles_active(), b.cycles_active());
            }
        }
    }

    #[test]
    fn unconstrained_cap_of_one() {
        let code = generate_code(16, 8, 4).unwrap();
        let llrs = LlrBlock::new((0..16).map(|i| if i < 3 { -0.5 } else { 1.0 + i as f64 }).collect(), 0);
        let hard = llrs.hard_decision();
        assert!(!code.is_codeword(&hard).unwrap());
        let r = decode_unconstrained(&llrs, &code, 1).unwrap();
        assert_eq!((r.word, r.queries_used, r.found), (hard, 1, false));
        assert!(decode_unconstrained(&llrs, &code, 0).is_err());
    }

    #[test]
    fn multi_word_syndromes() {
        // n - k = 80 spans two syndrome words
        let code = generate_code(140, 60, 6).unwrap();
        assert_eq!(code.syndrome_words(), 2);
        let (c, mut llrs) = noiseless(&code);
        for (pos, mag) in [(3, 0.2), (77, 0.3), (130, 0.25)] {
            llrs.llrs[pos] = -mag * llrs.llrs[pos].signum();
        }
        let r = decode_unconstrained(&llrs, &code, DEFAULT_QUERY_CAP).unwrap();
        assert!(r.found);
        assert_eq!(r.word, c);
        // ten patterns have weight < 6; {3,2,1} is the fourth of weight 6
        assert_eq!(r.queries_used, 14);
    }

    #[test]
    fn unconstrained_noiseless() {
        let code = generate_code(32, 20, 1).unwrap();
        let (c, llrs) = noiseless(&code);
        let r = decode_unconstrained(&llrs, &code, DEFAULT_QUERY_CAP).unwrap();
        assert_eq!((r.word, r.queries_used, r.found), (c, 1, true));
    }
}
