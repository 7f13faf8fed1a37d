//! Operating point at a target BLER for several schedules and arrival
//! intervals, and the loss against unconstrained decoding.
//!
//! `cargo run --release --example operating_frontier -- [trials]`

use fifogrand::harness::{find_operating_frontier, max_throughput_for_loss, Evaluator, FrontierParams, Setup, Workbench};
use fifogrand::{generate_code, HardwareProfile, ScheduleConfig};

fn main() -> fifogrand::Result<()> {
    let trials: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2000);
    let code = generate_code(64, 52, 3)?;
    let bench = Workbench::new(code, 2024, trials, HardwareProfile::D1, 1 << 20)?;
    let eval = Evaluator::new(&bench);
    let params = FrontierParams {
        start_db: 5.0,
        loss_targets_db: vec![0.1, 0.25],
        ..FrontierParams::default()
    };
    let setups: Vec<Setup> = [1usize, 4]
        .into_iter()
        .flat_map(|b| [1u64, 10, 100, 1000].map(|i| Setup::Fifo(ScheduleConfig::symmetric(b, 1, i, 4))))
        .collect();
    let frontier = find_operating_frontier(&eval, &setups, &params)?;

    println!("unconstrained: {:.3} dB", frontier.baseline.ebn0_db.unwrap_or(f64::NAN));
    println!("{:>3} {:>5} {:>12} {:>9} {:>9}", "F", "I", "theta Gb/s", "op dB", "loss dB");
    for r in &frontier.rows {
        println!(
            "{:>3} {:>5} {:>12.2} {:>9.3} {:>9.3}",
            r.fifo_size.unwrap_or(0),
            r.arrival_interval.unwrap_or(0),
            r.theta_bps / 1e9,
            r.op_db.unwrap_or(f64::NAN),
            r.loss_db.unwrap_or(f64::NAN)
        );
    }
    for loss in &params.loss_targets_db {
        for m in max_throughput_for_loss(&frontier, *loss) {
            println!(
                "loss <= {loss} dB, F = {}: {:.2} Gb/s at I = {}",
                m.fifo_size.unwrap_or(0),
                m.theta_bps.unwrap_or(0.0) / 1e9,
                m.arrival_interval.unwrap_or(0)
            );
        }
    }
    Ok(())
}
