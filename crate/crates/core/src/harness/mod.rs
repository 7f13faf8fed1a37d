//! Experiment runner: configuration, seeded pipelines, sweeps and frontiers.

pub mod config;
pub mod frontier;
pub mod pipeline;
pub mod point;
pub mod presets;
pub mod sweep;

pub use config::{Analysis, ChannelGrid, CodeParams, ExperimentConfig, FrontierParams, Mode, ScheduleSweep, CANONICAL_CODE_SEED};
pub use frontier::{
    baseline, find_operating_frontier, frontier_row, max_throughput_for_loss, search_operating_point, Evaluator, Frontier,
    FrontierRow, MaxThroughputRow, OperatingPoint,
};
pub use pipeline::{run_fifo, run_grandab, run_unconstrained, PointMeasurement, TrialBank};
pub use point::{expand_setups, run_point, ResultRow, Setup, Workbench, CSV_HEADER};
pub use presets::{preset, preset_names, PRESET_VERSION};
pub use sweep::{run_sweep, RunOptions, SweepReport};
