#![allow(dead_code)]

use fifogrand::channel::{ebn0_to_sigma2, LlrBlock};
use fifogrand::harness::TrialBank;
use fifogrand::orbgrand::logistic_weight;
use fifogrand::scheduler::{simulate_stepwise, simulate_traced, Scheduler};
use fifogrand::{BitBlock, CodeSpec, ScheduleConfig};

/// Trial bank and received stream of `count` codewords at `ebn0_db`.
pub fn stream(code: &CodeSpec, count: usize, ebn0_db: f64, seed: u64) -> (TrialBank, Vec<LlrBlock>) {
    let bank = TrialBank::new(code, seed, count).unwrap();
    let s = bank.llr_stream(ebn0_to_sigma2(ebn0_db, code.rate()).unwrap()).unwrap();
    (bank, s)
}

/// Number of subsets of `{1..n}` summing to `w`, by dynamic programming.
pub fn distinct_partition_counts(n: u32) -> Vec<u64> {
    distinct_partition_counts_upto(n, (n * (n + 1) / 2) as usize)
}

/// As [`distinct_partition_counts`], for weights `0..=max` only.
pub fn distinct_partition_counts_upto(n: u32, max: usize) -> Vec<u64> {
    let mut counts = vec![0u64; max + 1];
    counts[0] = 1;
    for part in 1..=n as usize {
        for w in (part..=max).rev() {
            counts[w] += counts[w - part];
        }
    }
    counts
}

/// Reliability rank of every position (1 = smallest `|llr|`, ties by index).
pub fn reference_ranks(llrs: &[f64]) -> Vec<u32> {
    let mut idx: Vec<usize> = (0..llrs.len()).collect();
    idx.sort_by(|&a, &b| llrs[a].abs().partial_cmp(&llrs[b].abs()).unwrap().then(a.cmp(&b)));
    let mut ranks = vec![0; llrs.len()];
    for (r, &pos) in idx.iter().enumerate() {
        ranks[pos] = r as u32 + 1;
    }
    ranks
}

/// Brute-force reference decoder: among all codewords, the one whose
/// difference from the hard decision has the smallest logistic weight under
/// `ranks`. Equal weights go to the descending-lexicographically larger rank
/// set, the order the enumeration visits them in.
pub fn ml_surrogate(code: &CodeSpec, hard: &BitBlock, ranks: &[u32]) -> BitBlock {
    let k = code.k();
    let mut best: Option<(u64, Vec<u32>, BitBlock)> = None;
    for m in 0..1u64 << k {
        let info = BitBlock::from_bits(&(0..k).map(|b| ((m >> b) & 1) as u8).collect::<Vec<_>>()).unwrap();
        let c = code.encode(&info).unwrap();
        let mut diff = c.clone();
        diff.xor_assign(hard).unwrap();
        let mut pattern: Vec<u32> = diff.ones().into_iter().map(|p| ranks[p]).collect();
        pattern.sort_unstable_by(|a, b| b.cmp(a));
        let w = logistic_weight(&pattern);
        let better = match &best {
            None => true,
            Some((bw, bp, _)) => w < *bw || (w == *bw && pattern > *bp),
        };
        if better {
            best = Some((w, pattern, c));
        }
    }
    best.unwrap().2
}

/// Runs the scheduler cycle by cycle and reports every invariant violation:
/// capacity bounds, conservation, output order, output cadence, agreement
/// between the stepped, reference and fast simulations, and determinism.
pub fn scheduler_violations(cfg: ScheduleConfig, code: &CodeSpec, blocks: &[LlrBlock]) -> Vec<String> {
    let mut v = Vec::new();
    let n = blocks.len() as u64;
    let (p, i) = (cfg.data_parallelism, cfg.arrival_interval);
    let mut sched = Scheduler::new(cfg, code, blocks).unwrap().with_trace();
    let limit = p * i + n * i + 2;
    while !sched.is_finished() {
        if sched.cycle() > limit {
            v.push(format!("{cfg:?}: still running at cycle {}", sched.cycle()));
            return v;
        }
        if let Err(e) = sched.advance_cycle() {
            v.push(format!("{cfg:?}: {e}"));
            return v;
        }
        if sched.fifo_len() > cfg.fifo_size {
            v.push(format!("{cfg:?}: FIFO holds {} at cycle {}", sched.fifo_len(), sched.cycle()));
        }
        if sched.rob().occupied() > cfg.rob_size {
            v.push(format!("{cfg:?}: ROB holds {} at cycle {}", sched.rob().occupied(), sched.cycle()));
        }
        if sched.in_flight() as u64 > p {
            v.push(format!("{cfg:?}: {} in flight at cycle {}", sched.in_flight(), sched.cycle()));
        }
        if sched.active_decoders() > cfg.num_decoders {
            v.push(format!("{cfg:?}: {} active decoders", sched.active_decoders()));
        }
    }
    let stepped = sched.outcome().clone();
    if stepped.records.len() as u64 != n {
        v.push(format!("{cfg:?}: {} in, {} out", n, stepped.records.len()));
    }
    for (k, r) in stepped.records.iter().enumerate() {
        if r.arrival_index != k as u64 {
            v.push(format!("{cfg:?}: output {k} carries codeword {}", r.arrival_index));
        }
        if r.expelled_at != p * i + k as u64 * i {
            v.push(format!("{cfg:?}: output {k} at cycle {} instead of {}", r.expelled_at, p * i + k as u64 * i));
        }
    }
    let (reference, ref_events) = simulate_stepwise(cfg, code, blocks).unwrap();
    let (fast, fast_events) = simulate_traced(cfg, code, blocks).unwrap();
    let (again, again_events) = simulate_traced(cfg, code, blocks).unwrap();
    if reference != stepped {
        v.push(format!("{cfg:?}: reference outcome differs from stepped run"));
    }
    if fast != reference || fast_events != ref_events {
        v.push(format!("{cfg:?}: fast run differs from reference"));
    }
    if again != fast || again_events != fast_events {
        v.push(format!("{cfg:?}: rerun is not deterministic"));
    }
    v
}
