//! Experiment configuration files (TOML).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear_code::{generate_code, CodeSpec};
use crate::metrics::HardwareProfile;
use crate::orbgrand::DEFAULT_QUERY_CAP;
use crate::scheduler::{OutputDuePolicy, ScheduleConfig};

/// Seed of the code instance every preset and acceptance run uses.
pub const CANONICAL_CODE_SEED: u64 = 256_234;
/// Master seed for info words and noise unless overridden.
pub const DEFAULT_MASTER_SEED: u64 = 2024;
pub const DEFAULT_TRIALS: u64 = 10_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// FIFO scheduling architecture.
    #[default]
    Fifo,
    /// ORBGRAND with only the query cap.
    Unconstrained,
    /// Abandonment after `alpha * I` queries per codeword.
    Grandab,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Fifo => "fifo",
            Mode::Unconstrained => "unconstrained",
            Mode::Grandab => "grandab",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Analysis {
    /// One row per point of the Cartesian product.
    #[default]
    Sweep,
    /// Operating point and loss per arrival interval.
    Frontier,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeParams {
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_code_seed")]
    pub seed: u64,
    /// Generator matrix file overriding `(n, k, seed)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix_file: Option<PathBuf>,
}

fn default_n() -> usize {
    256
}
fn default_k() -> usize {
    234
}
fn default_code_seed() -> u64 {
    CANONICAL_CODE_SEED
}

impl Default for CodeParams {
    fn default() -> Self {
        Self {
            n: default_n(),
            k: default_k(),
            seed: default_code_seed(),
            matrix_file: None,
        }
    }
}

impl CodeParams {
    pub fn build(&self, base_dir: &Path) -> Result<CodeSpec> {
        match &self.matrix_file {
            Some(path) => {
                let path = if path.is_absolute() { path.clone() } else { base_dir.join(path) };
                CodeSpec::load(path)
            }
            None => generate_code(self.n, self.k, self.seed),
        }
    }
}

/// `Eb/N0` values: an explicit list, or `start..=stop` by `step`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelGrid {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ebn0_db: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
}

impl ChannelGrid {
    pub fn list(values: &[f64]) -> Self {
        Self {
            ebn0_db: Some(values.to_vec()),
            ..Self::default()
        }
    }

    pub fn range(start: f64, stop: f64, step: f64) -> Self {
        Self {
            ebn0_db: None,
            start: Some(start),
            stop: Some(stop),
            step: Some(step),
        }
    }

    pub fn resolve(&self) -> Result<Vec<f64>> {
        let values = match (&self.ebn0_db, self.start, self.stop, self.step) {
            (Some(list), None, None, None) => list.clone(),
            (None, Some(start), Some(stop), Some(step)) => {
                if step.is_nan() || step <= 0.0 || stop < start {
                    return Err(Error::Config("channel: need step > 0 and stop >= start".into()));
                }
                let count = ((stop - start) / step + 1e-9).floor() as usize;
                (0..=count).map(|i| round_db(start + i as f64 * step)).collect()
            }
            _ => {
                return Err(Error::Config(
                    "channel: give either `ebn0_db = [...]` or all of `start`, `stop`, `step`".into(),
                ))
            }
        };
        if values.is_empty() {
            return Err(Error::Config("channel: empty Eb/N0 list".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("channel: Eb/N0 values must be finite".into()));
        }
        Ok(values)
    }
}

/// Rounds to 1e-9 dB so grid arithmetic yields stable keys.
pub fn round_db(v: f64) -> f64 {
    (v * 1e9).round() / 1e9
}

/// Scheduling parameters; every list is one sweep axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSweep {
    /// Symmetric family `F = R = P = b`; replaces the three lists below.
    /// `R` is raised to `D` when `b < D`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub buffers: Option<Vec<usize>>,
    #[serde(default = "one_usize")]
    pub fifo_size: Vec<usize>,
    #[serde(default = "one_usize")]
    pub rob_size: Vec<usize>,
    /// Defaults to `F` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data_parallelism: Option<Vec<u64>>,
    #[serde(default = "one_usize")]
    pub num_decoders: Vec<usize>,
    #[serde(default = "one_u64")]
    pub arrival_interval: Vec<u64>,
    #[serde(default)]
    pub output_due_policy: OutputDuePolicy,
}

fn one_usize() -> Vec<usize> {
    vec![1]
}
fn one_u64() -> Vec<u64> {
    vec![1]
}

impl Default for ScheduleSweep {
    fn default() -> Self {
        Self {
            buffers: None,
            fifo_size: one_usize(),
            rob_size: one_usize(),
            data_parallelism: None,
            num_decoders: one_usize(),
            arrival_interval: one_u64(),
            output_due_policy: OutputDuePolicy::SlotOwner,
        }
    }
}

impl ScheduleSweep {
    /// All schedule combinations (without `I`), in canonical order
    /// `(D, F, R, P)`.
    pub fn shapes(&self, alpha: u32) -> Result<Vec<ScheduleConfig>> {
        let mut out = Vec::new();
        for &d in &self.num_decoders {
            match &self.buffers {
                Some(bufs) => {
                    for &b in bufs {
                        out.push(ScheduleConfig {
                            rob_size: b.max(d),
                            output_due_policy: self.output_due_policy,
                            ..ScheduleConfig::symmetric(b, d, 1, alpha)
                        });
                    }
                }
                None => {
                    for &f in &self.fifo_size {
                        for &r in &self.rob_size {
                            let ps = self.data_parallelism.clone().unwrap_or_else(|| vec![f as u64]);
                            for p in ps {
                                out.push(ScheduleConfig {
                                    fifo_size: f,
                                    rob_size: r,
                                    num_decoders: d,
                                    arrival_interval: 1,
                                    data_parallelism: p,
                                    alpha,
                                    output_due_policy: self.output_due_policy,
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Operating-point search settings for frontier runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrontierParams {
    #[serde(default = "default_target")]
    pub target_bler: f64,
    #[serde(default = "default_coarse")]
    pub coarse_step_db: f64,
    #[serde(default = "default_fine")]
    pub fine_step_db: f64,
    /// Lowest `Eb/N0` the search may visit.
    #[serde(default = "default_min_db")]
    pub min_db: f64,
    /// Highest `Eb/N0` the search may visit.
    #[serde(default = "default_max_db")]
    pub max_db: f64,
    /// First coarse point; the search walks up or down from here.
    #[serde(default = "default_start_db")]
    pub start_db: f64,
    /// Loss budgets for the maximum-throughput summary.
    #[serde(default)]
    pub loss_targets_db: Vec<f64>,
}

fn default_target() -> f64 {
    0.01
}
fn default_coarse() -> f64 {
    0.25
}
fn default_fine() -> f64 {
    0.05
}
fn default_min_db() -> f64 {
    0.0
}
fn default_max_db() -> f64 {
    14.0
}
fn default_start_db() -> f64 {
    7.5
}

impl Default for FrontierParams {
    fn default() -> Self {
        Self {
            target_bler: default_target(),
            coarse_step_db: default_coarse(),
            fine_step_db: default_fine(),
            min_db: default_min_db(),
            max_db: default_max_db(),
            start_db: default_start_db(),
            loss_targets_db: Vec::new(),
        }
    }
}

impl FrontierParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.target_bler > 0.0 && self.target_bler < 1.0) {
            return Err(Error::Config("frontier.target_bler must be in (0, 1)".into()));
        }
        if !(self.fine_step_db > 0.0 && self.coarse_step_db >= self.fine_step_db) {
            return Err(Error::Config("frontier: need coarse_step_db >= fine_step_db > 0".into()));
        }
        if !(self.min_db <= self.start_db && self.start_db <= self.max_db) {
            return Err(Error::Config("frontier: need min_db <= start_db <= max_db".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out_dir")]
    pub dir: PathBuf,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("results")
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: default_out_dir() }
    }
}

/// A complete, self-describing experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    /// Decoder modes to run; each mode is one sweep axis.
    #[serde(default = "default_modes")]
    pub modes: Vec<Mode>,
    #[serde(default)]
    pub analysis: Analysis,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default = "default_master_seed")]
    pub master_seed: u64,
    #[serde(default = "default_query_cap")]
    pub query_cap: u64,
    #[serde(default)]
    pub code: CodeParams,
    #[serde(default)]
    pub channel: ChannelGrid,
    #[serde(default)]
    pub schedule: ScheduleSweep,
    #[serde(default)]
    pub hardware: HardwareProfile,
    #[serde(default)]
    pub frontier: FrontierParams,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_modes() -> Vec<Mode> {
    vec![Mode::Fifo]
}
fn default_trials() -> u64 {
    DEFAULT_TRIALS
}
fn default_master_seed() -> u64 {
    DEFAULT_MASTER_SEED
}
fn default_query_cap() -> u64 {
    DEFAULT_QUERY_CAP
}

impl ExperimentConfig {
    /// Parses TOML text. Syntax and schema errors carry the offending line
    /// and field.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Config(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(Error::Config("name: must be a non-empty file stem".into()));
        }
        if self.modes.is_empty() {
            return Err(Error::Config("modes: list is empty".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials: must be at least 1".into()));
        }
        if self.query_cap == 0 {
            return Err(Error::Config("query_cap: must be at least 1".into()));
        }
        if self.code.matrix_file.is_none() && (self.code.k == 0 || self.code.k > self.code.n) {
            return Err(Error::Config(format!("code: need 0 < k <= n, got n = {}, k = {}", self.code.n, self.code.k)));
        }
        self.hardware.validate()?;
        let s = &self.schedule;
        let lists = [
            ("schedule.fifo_size", s.fifo_size.is_empty()),
            ("schedule.rob_size", s.rob_size.is_empty()),
            ("schedule.num_decoders", s.num_decoders.is_empty()),
            ("schedule.arrival_interval", s.arrival_interval.is_empty()),
            ("schedule.buffers", s.buffers.as_ref().is_some_and(Vec::is_empty)),
            ("schedule.data_parallelism", s.data_parallelism.as_ref().is_some_and(Vec::is_empty)),
        ];
        if let Some((field, _)) = lists.iter().find(|(_, empty)| *empty) {
            return Err(Error::Config(format!("{field}: list is empty")));
        }
        if s.arrival_interval.contains(&0) {
            return Err(Error::Config("schedule.arrival_interval: values must be >= 1".into()));
        }
        if self.modes.contains(&Mode::Fifo) {
            for shape in s.shapes(self.hardware.alpha)? {
                shape
                    .validate()
                    .map_err(|e| Error::Config(format!("schedule: {e}")))?;
            }
        }
        match self.analysis {
            Analysis::Sweep => {
                self.channel.resolve()?;
            }
            Analysis::Frontier => {}
        }
        self.frontier.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = ExperimentConfig::from_toml(
            r#"
            name = "demo"
            [channel]
            ebn0_db = [7.0, 7.5]
            "#,
        )
        .unwrap();
        assert_eq!(cfg.code, CodeParams::default());
        assert_eq!(cfg.trials, DEFAULT_TRIALS);
        assert_eq!(cfg.modes, vec![Mode::Fifo]);
        assert_eq!(cfg.hardware, HardwareProfile::D1);
        assert_eq!(cfg.channel.resolve().unwrap(), vec![7.0, 7.5]);
    }

    #[test]
    fn range_grid() {
        let g = ChannelGrid::range(7.0, 8.0, 0.25);
        assert_eq!(g.resolve().unwrap(), vec![7.0, 7.25, 7.5, 7.75, 8.0]);
        let g = ChannelGrid::range(0.0, 0.3, 0.05);
        assert_eq!(g.resolve().unwrap().len(), 7);
    }

    #[test]
    fn errors_name_the_field() {
        let err = ExperimentConfig::from_toml("name = \"x\"\ntrials = 0\n[channel]\nebn0_db = [1.0]\n").unwrap_err();
        assert!(err.to_string().contains("trials"), "{err}");
        let err = ExperimentConfig::from_toml("name = \"x\"\n[channel]\nebn0_db = [1.0]\n[schedule]\nfifo_size = [1]\nrob_size = [1]\ndata_parallelism = [3]\n").unwrap_err();
        assert!(err.to_string().contains("schedule"), "{err}");
        let err = ExperimentConfig::from_toml("name = \"x\"\nbogus = 1\n").unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
        let err = ExperimentConfig::from_toml("name = \"x\"\n[channel]\nebn0_db = []\n").unwrap_err();
        assert!(err.to_string().contains("channel"), "{err}");
        let err = ExperimentConfig::from_toml("name = \"x\"\n[channel\n").unwrap_err();
        assert!(err.to_string().contains("line"), "{err}");
    }

    #[test]
    fn symmetric_shapes() {
        let s = ScheduleSweep {
            buffers: Some(vec![1, 4]),
            num_decoders: vec![1, 2],
            ..ScheduleSweep::default()
        };
        let shapes = s.shapes(4).unwrap();
        let tuples: Vec<_> = shapes
            .iter()
            .map(|c| (c.num_decoders, c.fifo_size, c.rob_size, c.data_parallelism))
            .collect();
        assert_eq!(tuples, vec![(1, 1, 1, 1), (1, 4, 4, 4), (2, 1, 2, 1), (2, 4, 4, 4)]);
    }

    #[test]
    fn toml_round_trip() {
        let cfg = ExperimentConfig {
            name: "rt".into(),
            modes: vec![Mode::Fifo, Mode::Unconstrained],
            analysis: Analysis::Sweep,
            trials: 10,
            master_seed: 3,
            query_cap: 100,
            code: CodeParams::default(),
            channel: ChannelGrid::list(&[1.0]),
            schedule: ScheduleSweep::default(),
            hardware: HardwareProfile::D1,
            frontier: FrontierParams::default(),
            output: OutputConfig::default(),
        };
        assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }
}
