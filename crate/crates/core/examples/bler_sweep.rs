//! A full sweep experiment written to CSV plus JSON metadata, the same path
//! the command-line tool takes.
//!
//! `cargo run --release --example bler_sweep -- [out_dir]`

use fifogrand::harness::{run_sweep, ExperimentConfig, RunOptions};

const CONFIG: &str = r#"
name = "bler_sweep"
modes = ["fifo", "unconstrained"]
trials = 1000

[channel]
start = 7.0
stop = 9.0
step = 0.5

[schedule]
buffers = [1, 4]
num_decoders = [1]
arrival_interval = [10, 100]
"#;

fn main() -> fifogrand::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "results".into());
    let cfg = ExperimentConfig::from_toml(CONFIG)?;
    let mut opts = RunOptions::new(&out);
    opts.workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let report = run_sweep(&cfg, &opts)?;

    println!("{:<14} {:>3} {:>5} {:>6} {:>8} {:>10}", "mode", "F", "I", "Eb/N0", "BLER", "beta");
    for r in &report.rows {
        let opt = |v: Option<u64>| v.map(|v| v.to_string()).unwrap_or_else(|| "-".into());
        println!(
            "{:<14} {:>3} {:>5} {:>6} {:>8.4} {:>10.1}",
            r.mode.name(),
            opt(r.fifo_size.map(|v| v as u64)),
            opt(r.arrival_interval),
            r.ebn0_db,
            r.bler,
            r.beta
        );
    }
    println!("wrote {} and {}", report.csv_path.display(), report.meta_path.display());
    Ok(())
}
