mod common;

use fifogrand::channel::LlrBlock;
use fifogrand::orbgrand::{decode_unconstrained, PatternGenerator};
use fifogrand::scheduler::{
    simulate_stepwise, simulate_traced, EventKind, OutputDuePolicy, Scheduler, TerminationCause, TraceEvent,
};
use fifogrand::{generate_code, simulate, CodeSpec, Error, ScheduleConfig};
use proptest::prelude::*;

const ALPHA: u32 = 4;

fn code() -> CodeSpec {
    generate_code(64, 16, 4).unwrap()
}

/// All-zero codeword received with `|llr| = 1 + position`, so rank `r` sits
/// at position `r - 1`, and the `q`-th pattern's positions flipped: ORBGRAND
/// needs exactly `q` queries.
fn block_needing(q: u64, code: &CodeSpec) -> Vec<f64> {
    let n = code.n();
    let pattern = PatternGenerator::new(n).nth(q as usize - 1).unwrap();
    let mut llrs: Vec<f64> = (0..n).map(|p| 1.0 + p as f64).collect();
    for r in pattern {
        llrs[r as usize - 1] = -llrs[r as usize - 1];
    }
    let check = decode_unconstrained(&LlrBlock::new(llrs.clone(), 0), code, q + 1).unwrap();
    assert_eq!(check.queries_used, q);
    assert!(check.word.is_zero());
    llrs
}

fn stream_of(queries: &[u64], code: &CodeSpec) -> Vec<LlrBlock> {
    queries
        .iter()
        .enumerate()
        .map(|(i, &q)| LlrBlock::new(block_needing(q, code), i as u64))
        .collect()
}

fn cfg(f: usize, r: usize, d: usize, p: u64, i: u64) -> ScheduleConfig {
    ScheduleConfig {
        fifo_size: f,
        rob_size: r,
        num_decoders: d,
        arrival_interval: i,
        data_parallelism: p,
        alpha: ALPHA,
        output_due_policy: OutputDuePolicy::SlotOwner,
    }
}

fn find(events: &[TraceEvent], kind: EventKind, arrival: u64) -> Option<&TraceEvent> {
    events.iter().find(|e| e.kind == kind && e.arrival_index == arrival)
}

const HARD: u64 = 5_000;

#[test]
fn borrowed_cycles_are_compensated() {
    let code = code();
    let stream = stream_of(&[80, 1, 1, 1], &code);
    let (out, events) = simulate_traced(cfg(4, 4, 1, 4, 10), &code, &stream).unwrap();
    assert_eq!(out.early_terminations(), 0);
    assert!(out.records.iter().all(|r| r.found && r.decoded.is_zero()));
    let expelled: Vec<u64> = out.records.iter().map(|r| r.expelled_at).collect();
    assert_eq!(expelled, vec![40, 50, 60, 70]);
    assert_eq!(find(&events, EventKind::Finish, 0).unwrap().cycle, 19);
    assert_eq!(find(&events, EventKind::Dispatch, 1).unwrap().cycle, 20);
    assert_eq!(find(&events, EventKind::Finish, 1).unwrap().cycle, 20);
}

#[test]
fn single_slot_config_is_a_query_budget() {
    let code = code();
    let stream = stream_of(&[40, 41, 1], &code);
    let out = simulate(cfg(1, 1, 1, 1, 10), &code, &stream).unwrap();
    let r = &out.records;
    assert!(r[0].found && r[0].queries_used == 40 && !r[0].early_terminated);
    assert!(!r[1].found && r[1].queries_used == 40);
    assert_eq!(r[1].cause, Some(TerminationCause::OutputDue));
    assert_eq!(r[1].decoded, LlrBlock::new(stream[1].llrs.clone(), 1).hard_decision());
    assert!(r[2].found && r[2].decoded.is_zero());
}

#[test]
fn output_due_emits_hard_decision() {
    let code = code();
    let stream = stream_of(&[HARD], &code);
    let (out, events) = simulate_traced(cfg(1, 1, 1, 1, 10), &code, &stream).unwrap();
    let rec = &out.records[0];
    assert!(rec.early_terminated);
    assert_eq!(rec.cause, Some(TerminationCause::OutputDue));
    assert_eq!(rec.decoded, stream[0].hard_decision());
    assert_eq!(rec.expelled_at, 10);
    let et = find(&events, EventKind::EarlyTerminate(TerminationCause::OutputDue), 0).unwrap();
    assert_eq!((et.cycle, et.decoder), (10, Some(0)));
}

#[test]
fn overflow_stops_longest_running_decoder() {
    // decoder 1 starts codeword 1 at cycle 4; decoder 0 starts codeword 2 at
    // cycle 8 after finishing codeword 0 in cycle 5
    let code = code();
    let stream = stream_of(&[24, HARD, HARD, 1, 1, 1], &code);
    let (out, events) = simulate_traced(cfg(1, 3, 2, 4, 4), &code, &stream).unwrap();
    assert_eq!(find(&events, EventKind::Finish, 0).unwrap().cycle, 5);
    assert_eq!(find(&events, EventKind::Dispatch, 2).unwrap().decoder, Some(0));
    let et = find(&events, EventKind::EarlyTerminate(TerminationCause::Overflow), 1).unwrap();
    assert_eq!((et.cycle, et.decoder), (16, Some(1)));
    assert_eq!(out.records[1].cause, Some(TerminationCause::Overflow));
    assert_eq!(find(&events, EventKind::Dispatch, 3).unwrap().decoder, Some(1));
}

#[test]
fn overflow_tie_stops_lowest_index() {
    // both decoders finish in cycle 13 and take codewords 2 and 3 in cycle 14
    let code = code();
    let stream = stream_of(&[56, 40, HARD, HARD, 1, 1, 1, 1], &code);
    let (out, events) = simulate_traced(cfg(2, 4, 2, 6, 4), &code, &stream).unwrap();
    assert_eq!(find(&events, EventKind::Dispatch, 2).unwrap().cycle, 14);
    assert_eq!(find(&events, EventKind::Dispatch, 3).unwrap().cycle, 14);
    let et = find(&events, EventKind::EarlyTerminate(TerminationCause::Overflow), 2).unwrap();
    assert_eq!((et.cycle, et.decoder), (24, Some(0)));
    assert_eq!(out.records[2].cause, Some(TerminationCause::Overflow));
}

#[test]
fn full_fifo_with_one_decoder() {
    let code = code();
    let stream = stream_of(&[HARD, 1, 1], &code);
    let mut s = Scheduler::new(cfg(1, 2, 1, 3, 10), &code, &stream).unwrap();
    let mut overflow_at = None;
    while !s.is_finished() {
        let events = s.advance_cycle().unwrap();
        let n = events
            .iter()
            .filter(|e| e.kind == EventKind::EarlyTerminate(TerminationCause::Overflow))
            .count();
        if n > 0 {
            assert_eq!(n, 1);
            assert_eq!(s.fifo_len(), 1);
            overflow_at = Some(s.cycle() - 1);
        }
    }
    assert_eq!(overflow_at, Some(20));
    assert_eq!(s.outcome().overflow_terminations, 1);
}

#[test]
fn easy_codeword_finishes_in_its_arrival_cycle() {
    let code = code();
    let stream = stream_of(&[ALPHA as u64, 3], &code);
    let (_, events) = simulate_traced(cfg(2, 2, 1, 2, 5), &code, &stream).unwrap();
    assert_eq!(find(&events, EventKind::Finish, 0).unwrap().cycle, 0);
    assert_eq!(find(&events, EventKind::Finish, 1).unwrap().cycle, 5);
}

#[test]
fn noiseless_single_codeword() {
    let code = code();
    let stream = stream_of(&[1], &code);
    for c in [cfg(1, 1, 1, 1, 1), cfg(4, 4, 1, 8, 10), cfg(2, 2, 2, 3, 7), cfg(3, 4, 2, 5, 20)] {
        let out = simulate(c, &code, &stream).unwrap();
        assert_eq!(out.records.len(), 1);
        let r = &out.records[0];
        assert!(r.found && r.decoded.is_zero() && r.queries_used == 1);
        assert_eq!(r.expelled_at, c.data_parallelism * c.arrival_interval);
        assert_eq!(out.early_terminations(), 0);
        assert_eq!(out.total_cycles, c.data_parallelism * c.arrival_interval + 1);
    }
}

#[test]
fn rob_slots_are_booked_circularly() {
    let code = code();
    let stream = stream_of(&[1, 30, 2, HARD, 1, 7, 1, 1, 90, 1, 1], &code);
    let c = cfg(2, 3, 2, 5, 6);
    let (out, events) = simulate_traced(c, &code, &stream).unwrap();
    let dispatches: Vec<&TraceEvent> = events.iter().filter(|e| e.kind == EventKind::Dispatch).collect();
    assert_eq!(dispatches.len(), stream.len());
    for (j, e) in dispatches.iter().enumerate() {
        assert_eq!(e.arrival_index, j as u64);
        assert_eq!(e.slot, Some(j % c.rob_size));
    }
    let expels: Vec<u64> = events.iter().filter(|e| e.kind == EventKind::Expel).map(|e| e.arrival_index).collect();
    assert_eq!(expels, (0..stream.len() as u64).collect::<Vec<_>>());
    assert_eq!(out.records.len(), stream.len());
}

#[test]
fn invalid_configs_are_rejected() {
    let code = code();
    let stream = stream_of(&[1], &code);
    assert!(matches!(simulate(cfg(2, 2, 1, 5, 1), &code, &stream), Err(Error::InvalidSchedule(_))));
    assert!(matches!(simulate(cfg(2, 1, 2, 2, 1), &code, &stream), Err(Error::InvalidSchedule(_))));
    assert!(simulate(cfg(0, 1, 1, 1, 1), &code, &stream).is_err());
    let shuffled = vec![LlrBlock::new(stream[0].llrs.clone(), 3)];
    assert!(simulate(cfg(1, 1, 1, 1, 1), &code, &shuffled).is_err());
    let short = vec![LlrBlock::new(vec![1.0; 10], 0)];
    assert!(matches!(simulate(cfg(1, 1, 1, 1, 1), &code, &short), Err(Error::LengthMismatch { .. })));
}

#[test]
fn trace_text_format() {
    let code = code();
    let stream = stream_of(&[1], &code);
    let (_, events) = simulate_traced(cfg(1, 1, 1, 1, 3), &code, &stream).unwrap();
    let text = fifogrand::scheduler::format_trace(&events);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# cycle event decoder arrival_index rob_slot");
    assert_eq!(lines[1], "0 arrive - 0 -");
    assert_eq!(lines[2], "0 dispatch 0 0 0");
    assert_eq!(lines[3], "0 finish 0 0 0");
    assert_eq!(lines[4], "3 expel - 0 0");
}

fn arb_config() -> impl Strategy<Value = ScheduleConfig> {
    (1usize..=4, 1usize..=2, 0usize..=3, 1u64..=20)
        .prop_flat_map(|(f, d, extra_r, i)| {
            let r = (d + extra_r).min(4).max(d);
            (Just(f), Just(r), Just(d), 1..=(f + r) as u64, Just(i))
        })
        .prop_map(|(f, r, d, p, i)| cfg(f, r, d, p, i))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn invariants_hold(c in arb_config(), count in 1usize..30, ebn0 in 2.0f64..8.0, seed in 0u64..1000) {
        let code = generate_code(64, 52, 9).unwrap();
        let (_, blocks) = common::stream(&code, count, ebn0, seed);
        let v = common::scheduler_violations(c, &code, &blocks);
        prop_assert!(v.is_empty(), "{:?}", v);
    }

    #[test]
    fn output_due_policies_agree(c in arb_config(), count in 1usize..30, ebn0 in 2.0f64..7.0, seed in 0u64..1000) {
        let code = generate_code(64, 52, 9).unwrap();
        let (_, blocks) = common::stream(&code, count, ebn0, seed);
        let other = ScheduleConfig { output_due_policy: OutputDuePolicy::LongestRunning, ..c };
        let (a, ea) = simulate_stepwise(c, &code, &blocks).unwrap();
        let (b, eb) = simulate_stepwise(other, &code, &blocks).unwrap();
        prop_assert_eq!(a, b);
        prop_assert_eq!(ea, eb);
    }

    #[test]
    fn decoded_words_have_code_length(c in arb_config(), seed in 0u64..100) {
        let code = generate_code(64, 52, 9).unwrap();
        let (_, blocks) = common::stream(&code, 12, 4.0, seed);
        let out = simulate(c, &code, &blocks).unwrap();
        for r in &out.records {
            prop_assert_eq!(r.decoded.len(), 64);
            if r.found {
                prop_assert!(code.is_codeword(&r.decoded).unwrap());
            }
        }
        prop_assert_eq!(out.active_cycles_total, out.active_cycles.iter().sum::<u64>());
        prop_assert_eq!(out.active_cycles_total, out.records.iter().map(|r| r.cycles_active).sum::<u64>());
    }
}
