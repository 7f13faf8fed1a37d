//! Runs the cycle-accurate FIFO scheduler on a handful of codewords and
//! prints the per-cycle trace and the per-codeword records.
//!
//! `cargo run --example fifo_schedule_trace -- [F] [D] [I]`

use fifogrand::channel::ebn0_to_sigma2;
use fifogrand::harness::TrialBank;
use fifogrand::scheduler::{format_trace, simulate_traced};
use fifogrand::{generate_code, ScheduleConfig};

fn main() -> fifogrand::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<u64>().ok());
    let buffers = args.next().flatten().unwrap_or(2) as usize;
    let decoders = args.next().flatten().unwrap_or(1) as usize;
    let interval = args.next().flatten().unwrap_or(4);

    let code = generate_code(64, 52, 5)?;
    let bank = TrialBank::new(&code, 1, 8)?;
    let stream = bank.llr_stream(ebn0_to_sigma2(6.0, code.rate())?)?;
    let cfg = ScheduleConfig {
        rob_size: buffers.max(decoders),
        ..ScheduleConfig::symmetric(buffers, decoders, interval, 4)
    };
    let (outcome, events) = simulate_traced(cfg, &code, &stream)?;

    print!("{}", format_trace(&events));
    println!();
    println!("idx  queries  found  early  expelled_at  correct");
    for r in &outcome.records {
        let ok = r.decoded == bank.codewords()[r.arrival_index as usize];
        println!(
            "{:>3}  {:>7}  {:>5}  {:>5}  {:>11}  {ok}",
            r.arrival_index, r.queries_used, r.found, r.early_terminated, r.expelled_at
        );
    }
    println!(
        "{} cycles, {} active decoder-cycles, {} early terminations",
        outcome.total_cycles,
        outcome.active_cycles_total,
        outcome.early_terminations()
    );
    Ok(())
}
