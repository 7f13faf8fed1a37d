mod common;

use std::collections::HashSet;

use fifogrand::channel::{compute_llrs, ebn0_to_sigma2, modulate, transmit, LlrBlock};
use fifogrand::harness::{run_fifo, run_grandab, run_unconstrained, TrialBank};
use fifogrand::orbgrand::{decode_grandab, decode_unconstrained, logistic_weight, rank_positions, PatternGenerator};
use fifogrand::{generate_code, BitBlock, ScheduleConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn pattern_counts_match_partition_oracle() {
    for n in 1..=12u32 {
        let oracle = common::distinct_partition_counts(n);
        let mut counts = vec![0u64; oracle.len()];
        let mut seen = HashSet::new();
        let mut last = 0;
        for p in PatternGenerator::new(n as usize) {
            let w = logistic_weight(&p);
            assert!(w >= last, "n={n}: weight decreased at {p:?}");
            last = w;
            counts[w as usize] += 1;
            assert!(seen.insert(p));
        }
        assert_eq!(counts, oracle, "n={n}");
        assert_eq!(seen.len(), 1 << n);
    }
}

#[test]
fn lazy_generator_is_cheap_at_full_length() {
    let mut g = PatternGenerator::new(256);
    let mut count = 0;
    while g.current_weight() <= 60 {
        g.next_pattern().unwrap();
        count += 1;
    }
    assert_eq!(count, g.queries_emitted());
    let through_60: u64 = common::distinct_partition_counts_upto(256, 60).iter().sum();
    assert_eq!(count, through_60 + 1);
}

#[test]
fn ml_surrogate_on_small_codes() {
    for (n, k, seed, db) in [(8, 4, 1, 0.0), (10, 5, 2, 2.0), (12, 8, 3, 4.0)] {
        let code = generate_code(n, k, seed).unwrap();
        let sigma2 = ebn0_to_sigma2(db, code.rate()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..200 {
            let y = transmit(&modulate(&BitBlock::zeros(n)), sigma2, &mut rng).unwrap();
            let llrs = compute_llrs(&y, sigma2).unwrap();
            let got = decode_unconstrained(&llrs, &code, 1 << n).unwrap();
            let want = common::ml_surrogate(&code, &llrs.hard_decision(), &common::reference_ranks(&llrs.llrs));
            assert_eq!(got.word, want);
            assert!(got.found);
        }
    }
}

#[test]
fn ranking_matches_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let y = transmit(&modulate(&BitBlock::zeros(40)), 0.8, &mut rng).unwrap();
    let llrs = compute_llrs(&y, 0.8).unwrap();
    let ranks = common::reference_ranks(&llrs.llrs);
    let perm = rank_positions(&llrs);
    for (pos, &r) in ranks.iter().enumerate() {
        assert_eq!(perm.position(r), pos);
    }
    let tied = LlrBlock::new(vec![2.0, -1.0, 1.0, -2.0], 0);
    assert_eq!(rank_positions(&tied).order(), &[1, 2, 0, 3]);
}

#[test]
fn grandab_matches_fifo_single_slot() {
    let code = generate_code(64, 52, 3).unwrap();
    let bank = TrialBank::new(&code, 17, 300).unwrap();
    let stream = bank.llr_stream(ebn0_to_sigma2(4.0, code.rate()).unwrap()).unwrap();
    for interval in [1, 3, 10, 100] {
        let (fifo, _, _) = run_fifo(&code, &bank, &stream, ScheduleConfig::symmetric(1, 1, interval, 4), false).unwrap();
        let ab = run_grandab(&code, &bank, &stream, 4, interval).unwrap();
        assert_eq!(fifo.decoded, ab.decoded, "I={interval}");
        assert_eq!(fifo.errors, ab.errors);
        assert_eq!(fifo.active_cycles_total, ab.active_cycles_total);
    }
}

#[test]
fn large_budget_matches_unconstrained() {
    let code = generate_code(48, 40, 6).unwrap();
    let bank = TrialBank::new(&code, 2, 200).unwrap();
    let stream = bank.llr_stream(ebn0_to_sigma2(5.0, code.rate()).unwrap()).unwrap();
    let unc = run_unconstrained(&code, &bank, &stream, 1 << 20).unwrap();
    let ab = run_grandab(&code, &bank, &stream, 4, 1 << 18).unwrap();
    assert_eq!(unc.decoded, ab.decoded);
    assert_eq!(unc.errors, ab.errors);
    assert_eq!(unc.beta, ab.beta);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn positive_llr_scaling_preserves_decoding(seed in 0u64..10_000, scale in 0.01f64..100.0, db in 1.0f64..8.0) {
        let code = generate_code(32, 24, 7).unwrap();
        let sigma2 = ebn0_to_sigma2(db, code.rate()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = transmit(&modulate(&BitBlock::zeros(32)), sigma2, &mut rng).unwrap();
        let llrs = compute_llrs(&y, sigma2).unwrap();
        let scaled = LlrBlock::new(llrs.llrs.iter().map(|v| v * scale).collect(), 0);
        let a = decode_unconstrained(&llrs, &code, 1 << 16).unwrap();
        let b = decode_unconstrained(&scaled, &code, 1 << 16).unwrap();
        prop_assert_eq!(a.word, b.word);
        prop_assert_eq!(a.queries_used, b.queries_used);
    }

    #[test]
    fn decoded_word_is_a_codeword(seed in 0u64..10_000, db in 0.0f64..6.0) {
        let code = generate_code(24, 16, 5).unwrap();
        let sigma2 = ebn0_to_sigma2(db, code.rate()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = transmit(&modulate(&BitBlock::zeros(24)), sigma2, &mut rng).unwrap();
        let r = decode_unconstrained(&compute_llrs(&y, sigma2).unwrap(), &code, 1 << 24).unwrap();
        prop_assert!(r.found);
        prop_assert!(code.is_codeword(&r.word).unwrap());
        prop_assert!(r.queries_used >= 1 && r.queries_used <= 1 << 24);
    }

    #[test]
    fn budget_is_respected(seed in 0u64..10_000, budget in 1u64..200) {
        let code = generate_code(64, 52, 1).unwrap();
        let sigma2 = ebn0_to_sigma2(3.0, code.rate()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = transmit(&modulate(&BitBlock::zeros(64)), sigma2, &mut rng).unwrap();
        let llrs = compute_llrs(&y, sigma2).unwrap();
        let r = decode_grandab(&llrs, &code, budget).unwrap();
        prop_assert!(r.queries_used <= budget);
        if !r.found {
            prop_assert_eq!(r.queries_used, budget);
            prop_assert_eq!(r.word, llrs.hard_decision());
        }
    }

    #[test]
    fn encoding_is_linear(seed in 0u64..1000, a in prop::collection::vec(0u8..2, 20), b in prop::collection::vec(0u8..2, 20)) {
        let code = generate_code(31, 20, seed).unwrap();
        let (ua, ub) = (BitBlock::from_bits(&a).unwrap(), BitBlock::from_bits(&b).unwrap());
        let mut sum = ua.clone();
        sum.xor_assign(&ub).unwrap();
        let mut ca = code.encode(&ua).unwrap();
        ca.xor_assign(&code.encode(&ub).unwrap()).unwrap();
        prop_assert_eq!(code.encode(&sum).unwrap(), ca.clone());
        prop_assert!(code.is_codeword(&ca).unwrap());
        prop_assert_eq!(ca.prefix(20), sum);
    }
}
