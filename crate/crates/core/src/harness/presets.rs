//! Named, version-pinned experiment presets.

use super::config::{
    Analysis, ChannelGrid, CodeParams, ExperimentConfig, FrontierParams, Mode, OutputConfig, ScheduleSweep, DEFAULT_MASTER_SEED,
    DEFAULT_TRIALS,
};
use crate::error::{Error, Result};
use crate::metrics::HardwareProfile;
use crate::orbgrand::DEFAULT_QUERY_CAP;

/// Bumped whenever any preset changes.
pub const PRESET_VERSION: &str = "1";

const NAMES: [&str; 7] = ["fig1", "fig4a", "fig4b", "fig4c", "fig5a", "fig5b", "fig5c"];

/// Arrival intervals of the frontier presets: 1-2-5 steps up to `10^5`.
pub const FRONTIER_INTERVALS: [u64; 16] = [
    1, 2, 5, 10, 20, 50, 100, 200, 500, 1_000, 2_000, 5_000, 10_000, 20_000, 50_000, 100_000,
];

pub fn preset_names() -> &'static [&'static str] {
    &NAMES
}

fn base(name: &str) -> ExperimentConfig {
    ExperimentConfig {
        name: name.into(),
        modes: vec![Mode::Fifo],
        analysis: Analysis::Sweep,
        trials: DEFAULT_TRIALS,
        master_seed: DEFAULT_MASTER_SEED,
        query_cap: DEFAULT_QUERY_CAP,
        code: CodeParams::default(),
        channel: ChannelGrid::default(),
        schedule: ScheduleSweep::default(),
        hardware: HardwareProfile::D1,
        frontier: FrontierParams::default(),
        output: OutputConfig::default(),
    }
}

fn frontier(name: &str, buffers: Vec<usize>, decoders: Vec<usize>, loss_targets: Vec<f64>) -> ExperimentConfig {
    ExperimentConfig {
        analysis: Analysis::Frontier,
        schedule: ScheduleSweep {
            buffers: Some(buffers),
            num_decoders: decoders,
            arrival_interval: FRONTIER_INTERVALS.to_vec(),
            ..ScheduleSweep::default()
        },
        frontier: FrontierParams {
            loss_targets_db: loss_targets,
            ..FrontierParams::default()
        },
        ..base(name)
    }
}

/// The preset called `name`.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let cfg = match name {
        // constant vs average throughput, without (1,1) and with (4,1) scheduling
        "fig1" => frontier(name, vec![1, 4], vec![1], vec![0.05, 0.1]),
        // BLER vs data parallelism
        "fig4a" => ExperimentConfig {
            channel: ChannelGrid::list(&[8.0]),
            schedule: ScheduleSweep {
                fifo_size: vec![4],
                rob_size: vec![4],
                data_parallelism: Some((1..=8).collect()),
                num_decoders: vec![1],
                arrival_interval: vec![10],
                ..ScheduleSweep::default()
            },
            ..base(name)
        },
        // BLER vs Eb/N0 for several arrival intervals
        "fig4b" => ExperimentConfig {
            modes: vec![Mode::Fifo, Mode::Unconstrained],
            channel: ChannelGrid::range(7.0, 10.0, 0.5),
            schedule: ScheduleSweep {
                buffers: Some(vec![4]),
                num_decoders: vec![1],
                arrival_interval: vec![1, 10, 100, 1_000, 10_000, 100_000],
                ..ScheduleSweep::default()
            },
            ..base(name)
        },
        // BLER vs Eb/N0 for the six configurations
        "fig4c" => ExperimentConfig {
            modes: vec![Mode::Fifo, Mode::Unconstrained],
            channel: ChannelGrid::range(7.0, 11.0, 0.5),
            schedule: ScheduleSweep {
                buffers: Some(vec![1, 2, 4]),
                num_decoders: vec![1, 2],
                arrival_interval: vec![1, 10],
                ..ScheduleSweep::default()
            },
            ..base(name)
        },
        // throughput vs loss frontier
        "fig5a" => frontier(name, vec![1, 2, 4], vec![1, 2], Vec::new()),
        // latency and power at fixed loss budgets
        "fig5b" | "fig5c" => frontier(name, vec![1, 2, 4], vec![1, 2], vec![0.1, 0.05]),
        other => {
            return Err(Error::Config(format!(
                "unknown preset `{other}`; available: {}",
                NAMES.join(", ")
            )))
        }
    };
    cfg.validate()?;
    Ok(cfg)
}
