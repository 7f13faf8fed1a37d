//! BLER of abandonment decoding versus FIFO scheduling at equal arrival
//! intervals, on the same noise realizations.
//!
//! `cargo run --release --example grandab_vs_fifo -- [trials]`

use fifogrand::harness::{Setup, Workbench, CANONICAL_CODE_SEED};
use fifogrand::{generate_code, HardwareProfile, ScheduleConfig};

fn main() -> fifogrand::Result<()> {
    let trials: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2000);
    let code = generate_code(256, 234, CANONICAL_CODE_SEED)?;
    let bench = Workbench::new(code, 2024, trials, HardwareProfile::D1, 1 << 20)?;
    let ebn0 = 8.0;

    println!("Eb/N0 {ebn0} dB, {trials} codewords");
    println!("{:>6} {:>10} {:>10} {:>10}", "I", "grandab", "fifo(2,1)", "fifo(4,1)");
    for interval in [1, 10, 100, 1000] {
        let ab = bench.run_point(Setup::Grandab { interval }, ebn0, false)?.row;
        let f2 = bench.run_point(Setup::Fifo(ScheduleConfig::symmetric(2, 1, interval, 4)), ebn0, false)?.row;
        let f4 = bench.run_point(Setup::Fifo(ScheduleConfig::symmetric(4, 1, interval, 4)), ebn0, false)?.row;
        println!("{interval:>6} {:>10.4} {:>10.4} {:>10.4}", ab.bler, f2.bler, f4.bler);
    }
    let unc = bench.run_point(Setup::Unconstrained, ebn0, false)?.row;
    println!("unconstrained {:.4}, mean queries {:.1}", unc.bler, unc.beta);
    Ok(())
}
