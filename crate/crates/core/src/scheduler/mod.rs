//! Cycle-accurate model of the fixed-throughput FIFO scheduling architecture:
//! an input FIFO of `F` blocks, `D` ORBGRAND decoder cores, and a re-order
//! buffer of `R` slots booked in arrival order.
//!
//! Codewords arrive every `I` cycles starting at cycle 0. After a warm-up of
//! `P * I` cycles one codeword leaves the ROB every `I` cycles, so output `k`
//! is expelled at cycle `P * I + k * I`. Each cycle runs four phases:
//!
//! 1. output: expel the head slot if due, early-terminating its decoder if it
//!    is still running;
//! 2. dispatch: move FIFO heads to idle decoders while ROB slots are free;
//! 3. arrival: enqueue the new block, early-terminating the longest-running
//!    decoder first if the FIFO is full, then dispatch again;
//! 4. decode: every active core tests `alpha` patterns.

mod rob;
mod trace;

use std::collections::VecDeque;

use crate::channel::LlrBlock;
use crate::error::{Error, Result};
use crate::linear_code::CodeSpec;
use crate::orbgrand::{CoreStatus, DecodeResult, DecoderCore};

pub use rob::{Filled, Rob, RobSlot, TerminationCause};
pub use trace::{format_trace, EventKind, TraceEvent};

/// Which decoder an output-due early termination stops.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputDuePolicy {
    /// The decoder booked to the due slot.
    #[default]
    SlotOwner,
    /// The longest-running decoder; the slot owner is also stopped if that
    /// does not fill the due slot.
    LongestRunning,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ScheduleConfig {
    pub fifo_size: usize,
    pub rob_size: usize,
    pub num_decoders: usize,
    pub arrival_interval: u64,
    pub data_parallelism: u64,
    pub alpha: u32,
    #[serde(default)]
    pub output_due_policy: OutputDuePolicy,
}

impl ScheduleConfig {
    /// `F = R = P`, the family used for most experiments.
    pub fn symmetric(buffers: usize, decoders: usize, arrival_interval: u64, alpha: u32) -> Self {
        Self {
            fifo_size: buffers,
            rob_size: buffers,
            num_decoders: decoders,
            arrival_interval,
            data_parallelism: buffers as u64,
            alpha,
            output_due_policy: OutputDuePolicy::SlotOwner,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSchedule(m));
        if self.fifo_size == 0 || self.rob_size == 0 || self.num_decoders == 0 {
            return bad("F, R and D must be at least 1".into());
        }
        if self.arrival_interval == 0 || self.data_parallelism == 0 || self.alpha == 0 {
            return bad("I, P and alpha must be at least 1".into());
        }
        if self.data_parallelism > (self.fifo_size + self.rob_size) as u64 {
            return bad(format!(
                "P = {} exceeds F + R = {}",
                self.data_parallelism,
                self.fifo_size + self.rob_size
            ));
        }
        if self.rob_size < self.num_decoders {
            return bad(format!("R = {} must be at least D = {}", self.rob_size, self.num_decoders));
        }
        Ok(())
    }

    /// Cycle of the first expulsion.
    pub fn warmup_cycles(&self) -> u64 {
        self.data_parallelism * self.arrival_interval
    }
}

/// Per-codeword outcome, in arrival order.
#[derive(Clone, Debug, PartialEq)]
pub struct CodewordRecord {
    pub arrival_index: u64,
    pub decoded: crate::bits::BitBlock,
    pub queries_used: u64,
    pub cycles_active: u64,
    pub found: bool,
    pub early_terminated: bool,
    pub cause: Option<TerminationCause>,
    pub expelled_at: u64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SimOutcome {
    pub records: Vec<CodewordRecord>,
    /// Active cycles per decoder.
    pub active_cycles: Vec<u64>,
    /// Sum of `active_cycles`.
    pub active_cycles_total: u64,
    /// Cycles simulated, including the final expulsion cycle.
    pub total_cycles: u64,
    pub overflow_terminations: u64,
    pub output_due_terminations: u64,
}

impl SimOutcome {
    pub fn early_terminations(&self) -> u64 {
        self.overflow_terminations + self.output_due_terminations
    }

    pub fn total_queries(&self) -> u64 {
        self.records.iter().map(|r| r.queries_used).sum()
    }
}

/// Mutable state of one simulation run.
pub struct Scheduler<'a> {
    config: ScheduleConfig,
    code: &'a CodeSpec,
    stream: &'a [LlrBlock],
    cycle: u64,
    fifo: VecDeque<usize>,
    decoders: Vec<DecoderCore>,
    /// First cycle at which an idle decoder may take new work.
    free_at: Vec<u64>,
    rob: Rob,
    next_arrival: usize,
    next_output: usize,
    outcome: SimOutcome,
    events: Option<Vec<TraceEvent>>,
}

impl<'a> Scheduler<'a> {
    pub fn new(config: ScheduleConfig, code: &'a CodeSpec, stream: &'a [LlrBlock]) -> Result<Self> {
        config.validate()?;
        for (i, block) in stream.iter().enumerate() {
            if block.len() != code.n() {
                return Err(Error::LengthMismatch {
                    expected: code.n(),
                    actual: block.len(),
                });
            }
            if block.arrival_index != i as u64 {
                return Err(Error::InvalidSchedule(format!(
                    "block at stream position {i} carries arrival index {}",
                    block.arrival_index
                )));
            }
        }
        Ok(Self {
            config,
            code,
            stream,
            cycle: 0,
            fifo: VecDeque::with_capacity(config.fifo_size + 1),
            decoders: (0..config.num_decoders).map(|_| DecoderCore::new(code.n())).collect(),
            free_at: vec![0; config.num_decoders],
            rob: Rob::new(config.rob_size),
            next_arrival: 0,
            next_output: 0,
            outcome: SimOutcome {
                active_cycles: vec![0; config.num_decoders],
                ..SimOutcome::default()
            },
            events: None,
        })
    }

    /// Records trace events during [`Scheduler::run`].
    pub fn with_trace(mut self) -> Self {
        self.events = Some(Vec::new());
        self
    }

    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    pub fn is_finished(&self) -> bool {
        self.next_output >= self.stream.len()
    }

    pub fn fifo_len(&self) -> usize {
        self.fifo.len()
    }

    pub fn rob(&self) -> &Rob {
        &self.rob
    }

    pub fn decoders(&self) -> &[DecoderCore] {
        &self.decoders
    }

    pub fn active_decoders(&self) -> usize {
        self.decoders.iter().filter(|d| d.status() == CoreStatus::Active).count()
    }

    /// Codewords admitted and not yet expelled.
    pub fn in_flight(&self) -> usize {
        self.next_arrival - self.next_output
    }

    pub fn outcome(&self) -> &SimOutcome {
        &self.outcome
    }

    fn interval(&self) -> u64 {
        self.config.arrival_interval
    }

    fn output_due(&self) -> bool {
        !self.is_finished()
            && self.cycle.is_multiple_of(self.interval())
            && self.cycle >= self.config.warmup_cycles()
    }

    fn arrival_due(&self) -> bool {
        self.next_arrival < self.stream.len() && self.cycle.is_multiple_of(self.interval())
    }

    fn bug(&self, message: impl Into<String>) -> Error {
        Error::Internal {
            cycle: self.cycle,
            message: message.into(),
        }
    }

    fn emit(&mut self, cycle: u64, kind: EventKind, decoder: Option<usize>, arrival_index: u64, slot: Option<usize>) {
        if let Some(events) = self.events.as_mut() {
            events.push(TraceEvent {
                cycle,
                kind,
                decoder,
                arrival_index,
                slot,
            });
        }
    }

    /// Simulates one clock cycle and returns the events it produced.
    pub fn advance_cycle(&mut self) -> Result<Vec<TraceEvent>> {
        let saved = self.events.replace(Vec::new());
        let result = self.cycle_inner();
        let produced = std::mem::replace(&mut self.events, saved).unwrap_or_default();
        if let Some(all) = self.events.as_mut() {
            all.extend_from_slice(&produced);
        }
        result.map(|()| produced)
    }

    fn cycle_inner(&mut self) -> Result<()> {
        if self.is_finished() {
            return Err(self.bug("advance after the last expulsion"));
        }
        if self.output_due() {
            self.output_phase()?;
        }
        self.dispatch_phase(self.cycle)?;
        if self.arrival_due() {
            self.arrival_phase()?;
        }
        self.decode_phase()?;
        self.check_capacity()?;
        self.cycle += 1;
        if self.is_finished() {
            self.outcome.total_cycles = self.cycle;
        }
        Ok(())
    }

    fn output_phase(&mut self) -> Result<()> {
        if !self.rob.head_is_filled() {
            let head = self.rob.head();
            let owner = self
                .decoders
                .iter()
                .position(|d| d.status() == CoreStatus::Active && d.booked_slot() == Some(head))
                .ok_or_else(|| self.bug(format!("output due but head slot {head} has no running decoder")))?;
            if self.config.output_due_policy == OutputDuePolicy::LongestRunning {
                let longest = self.longest_running().expect("owner is active");
                self.terminate(longest, TerminationCause::OutputDue)?;
            }
            if !self.rob.head_is_filled() {
                self.terminate(owner, TerminationCause::OutputDue)?;
            }
        }
        let (slot, filled) = self.rob.expel().ok_or_else(|| self.bug("head slot empty after termination"))?;
        let index = filled.result.arrival_index;
        if index != self.next_output as u64 {
            return Err(self.bug(format!("expelled codeword {index}, expected {}", self.next_output)));
        }
        let expected_cycle = self.config.warmup_cycles() + index * self.interval();
        if expected_cycle != self.cycle {
            return Err(self.bug(format!("codeword {index} expelled off cadence")));
        }
        self.emit(self.cycle, EventKind::Expel, None, index, Some(slot));
        let r = filled.result;
        self.outcome.records.push(CodewordRecord {
            arrival_index: index,
            decoded: r.word,
            queries_used: r.queries_used,
            cycles_active: r.cycles_active,
            found: r.found,
            early_terminated: r.early_terminated,
            cause: filled.cause,
            expelled_at: self.cycle,
        });
        self.next_output += 1;
        Ok(())
    }

    /// Largest `cycles_active` among active decoders; ties go to the lowest index.
    fn longest_running(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, d) in self.decoders.iter().enumerate() {
            if d.status() != CoreStatus::Active {
                continue;
            }
            if best.is_none_or(|b| d.cycles_active() > self.decoders[b].cycles_active()) {
                best = Some(i);
            }
        }
        best
    }

    fn terminate(&mut self, decoder: usize, cause: TerminationCause) -> Result<()> {
        let slot = self.decoders[decoder]
            .booked_slot()
            .ok_or_else(|| self.bug(format!("decoder {decoder} has no booked slot")))?;
        let result = self.decoders[decoder].terminate()?;
        self.free_at[decoder] = self.cycle;
        match cause {
            TerminationCause::Overflow => self.outcome.overflow_terminations += 1,
            TerminationCause::OutputDue => self.outcome.output_due_terminations += 1,
        }
        self.emit(self.cycle, EventKind::EarlyTerminate(cause), Some(decoder), result.arrival_index, Some(slot));
        self.store(slot, result, Some(cause))
    }

    fn store(&mut self, slot: usize, result: DecodeResult, cause: Option<TerminationCause>) -> Result<()> {
        let index = result.arrival_index;
        if self.rob.fill(slot, result, cause) {
            Ok(())
        } else {
            Err(self.bug(format!("slot {slot} was not booked for codeword {index}")))
        }
    }

    /// Moves FIFO heads into idle decoders (lowest index first) while ROB
    /// slots are free. Returns the decoders that were loaded.
    fn dispatch_phase(&mut self, at: u64) -> Result<Vec<usize>> {
        let mut loaded = Vec::new();
        while !self.fifo.is_empty() && self.rob.has_free_slot() {
            let Some(decoder) =
                (0..self.decoders.len()).find(|&i| self.decoders[i].status() == CoreStatus::Idle && self.free_at[i] <= at)
            else {
                break;
            };
            let index = self.fifo.pop_front().expect("fifo non-empty");
            let slot = self
                .rob
                .book(index as u64)
                .ok_or_else(|| self.bug("free slot reported but booking failed"))?;
            self.decoders[decoder].load(&self.stream[index], self.code, Some(slot))?;
            self.emit(at, EventKind::Dispatch, Some(decoder), index as u64, Some(slot));
            loaded.push(decoder);
        }
        Ok(loaded)
    }

    fn arrival_phase(&mut self) -> Result<()> {
        if self.fifo.len() >= self.config.fifo_size {
            let victim = self
                .longest_running()
                .ok_or_else(|| self.bug("FIFO full on arrival with no running decoder"))?;
            self.terminate(victim, TerminationCause::Overflow)?;
            self.dispatch_phase(self.cycle)?;
        }
        let index = self.next_arrival;
        self.fifo.push_back(index);
        self.next_arrival += 1;
        self.emit(self.cycle, EventKind::Arrive, None, index as u64, None);
        if self.fifo.len() > self.config.fifo_size {
            return Err(self.bug("FIFO overflow after arrival phase"));
        }
        self.dispatch_phase(self.cycle)?;
        Ok(())
    }

    fn decode_phase(&mut self) -> Result<()> {
        for i in 0..self.decoders.len() {
            if self.decoders[i].status() != CoreStatus::Active {
                continue;
            }
            self.outcome.active_cycles[i] += 1;
            self.outcome.active_cycles_total += 1;
            if self.decoders[i].step(self.config.alpha, self.code)? == CoreStatus::Done {
                self.finish(i, self.cycle)?;
            }
        }
        Ok(())
    }

    fn finish(&mut self, decoder: usize, cycle: u64) -> Result<()> {
        let slot = self.decoders[decoder]
            .booked_slot()
            .ok_or_else(|| self.bug(format!("decoder {decoder} finished without a slot")))?;
        let result = self.decoders[decoder].take_result()?;
        self.free_at[decoder] = cycle + 1;
        self.emit(cycle, EventKind::Finish, Some(decoder), result.arrival_index, Some(slot));
        self.store(slot, result, None)
    }

    fn check_capacity(&self) -> Result<()> {
        if self.fifo.len() > self.config.fifo_size {
            return Err(self.bug("FIFO capacity exceeded"));
        }
        if self.rob.occupied() > self.config.rob_size {
            return Err(self.bug("ROB capacity exceeded"));
        }
        if self.in_flight() as u64 > self.config.data_parallelism {
            return Err(self.bug(format!("{} codewords in flight, P = {}", self.in_flight(), self.config.data_parallelism)));
        }
        Ok(())
    }

    /// Runs to completion. Cycles between arrival/output instants are
    /// simulated in bulk per decoder; the result is identical to calling
    /// [`Scheduler::advance_cycle`] until finished.
    pub fn run(mut self) -> Result<(SimOutcome, Vec<TraceEvent>)> {
        let interval = self.interval();
        while !self.is_finished() {
            if self.cycle.is_multiple_of(interval) {
                self.cycle_inner()?;
                continue;
            }
            let boundary = (self.cycle / interval + 1) * interval;
            self.run_span(boundary)?;
            self.cycle = boundary;
        }
        let events = self.events.take().unwrap_or_default();
        Ok((self.outcome, events))
    }

    /// Simulates cycles `[self.cycle, end)`, none of which has an arrival or
    /// an expulsion. Only dispatch and decode happen, and running cores do
    /// not interact, so each core is run ahead independently and dispatch is
    /// replayed at the cycles where cores become free.
    fn run_span(&mut self, end: u64) -> Result<()> {
        let span_start = self.events.as_ref().map(Vec::len);
        // cycle through which each decoder has been simulated (exclusive)
        let mut clock = vec![self.cycle; self.decoders.len()];
        let mut t = self.cycle;
        loop {
            for d in self.dispatch_phase(t)? {
                clock[d] = t;
            }
            for (i, c) in clock.iter_mut().enumerate() {
                if self.decoders[i].status() != CoreStatus::Active || *c >= end {
                    continue;
                }
                let used = self.decoders[i].run_cycles(self.config.alpha, self.code, end - *c)?;
                self.outcome.active_cycles[i] += used;
                self.outcome.active_cycles_total += used;
                *c += used;
                if self.decoders[i].status() == CoreStatus::Done {
                    self.finish(i, *c - 1)?;
                }
            }
            if self.fifo.is_empty() || !self.rob.has_free_slot() {
                break;
            }
            let next = (0..self.decoders.len())
                .filter(|&i| self.decoders[i].status() == CoreStatus::Idle && self.free_at[i] > t && self.free_at[i] < end)
                .map(|i| self.free_at[i])
                .min();
            match next {
                Some(n) => t = n,
                None => break,
            }
        }
        if let (Some(start), Some(events)) = (span_start, self.events.as_mut()) {
            events[start..].sort_by_key(|e| {
                let rank = if e.kind == EventKind::Dispatch { 0 } else { 1 };
                (e.cycle, rank, e.decoder)
            });
        }
        self.check_capacity()
    }
}

/// Runs a stream through the architecture.
pub fn simulate(config: ScheduleConfig, code: &CodeSpec, stream: &[LlrBlock]) -> Result<SimOutcome> {
    Ok(Scheduler::new(config, code, stream)?.run()?.0)
}

/// Like [`simulate`], also returning the cycle trace.
pub fn simulate_traced(config: ScheduleConfig, code: &CodeSpec, stream: &[LlrBlock]) -> Result<(SimOutcome, Vec<TraceEvent>)> {
    Scheduler::new(config, code, stream)?.with_trace().run()
}

/// Reference run that steps every cycle individually.
pub fn simulate_stepwise(config: ScheduleConfig, code: &CodeSpec, stream: &[LlrBlock]) -> Result<(SimOutcome, Vec<TraceEvent>)> {
    let mut s = Scheduler::new(config, code, stream)?.with_trace();
    while !s.is_finished() {
        s.advance_cycle()?;
    }
    let events = s.events.take().unwrap_or_default();
    Ok((s.outcome, events))
}
