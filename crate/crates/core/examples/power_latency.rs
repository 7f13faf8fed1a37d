//! Throughput, latency, activity and dynamic power of several schedules.
//!
//! `cargo run --release --example power_latency -- [ebn0_db]`

use fifogrand::harness::{Setup, Workbench, CANONICAL_CODE_SEED};
use fifogrand::{generate_code, HardwareProfile, ScheduleConfig};

fn main() -> fifogrand::Result<()> {
    let ebn0: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(8.5);
    let code = generate_code(256, 234, CANONICAL_CODE_SEED)?;
    let bench = Workbench::new(code, 2024, 2000, HardwareProfile::D1, 1 << 20)?;

    println!("{:>2} {:>2} {:>2} {:>5} {:>10} {:>11} {:>8} {:>9} {:>8}", "F", "R", "D", "I", "Gb/s", "latency ns", "eta", "P_dyn mW", "BLER");
    for (b, d) in [(1, 1), (2, 1), (4, 1), (2, 2), (4, 2)] {
        for interval in [10, 100] {
            let cfg = ScheduleConfig {
                rob_size: b.max(d),
                ..ScheduleConfig::symmetric(b, d, interval, 4)
            };
            let r = bench.run_point(Setup::Fifo(cfg), ebn0, false)?.row;
            println!(
                "{:>2} {:>2} {:>2} {:>5} {:>10.2} {:>11.1} {:>8.4} {:>9.2} {:>8.4}",
                cfg.fifo_size,
                cfg.rob_size,
                d,
                interval,
                r.theta_bps / 1e9,
                r.latency_s.unwrap_or(0.0) * 1e9,
                r.eta_act.unwrap_or(0.0),
                r.p_dyn_w.unwrap_or(0.0) * 1e3,
                r.bler
            );
        }
    }
    Ok(())
}
