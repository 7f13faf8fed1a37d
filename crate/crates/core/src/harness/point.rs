//! Single measurement points and the CSV row they produce.

use std::cmp::Ordering;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{round_db, ExperimentConfig, Mode};
use super::pipeline::{self, PointMeasurement, TrialBank};
use crate::channel::ebn0_to_sigma2;
use crate::error::{Error, Result};
use crate::linear_code::CodeSpec;
use crate::metrics::{self, HardwareProfile};
use crate::scheduler::{ScheduleConfig, TraceEvent};

/// Exact CSV header of result files.
pub const CSV_HEADER: &str = "n,k,code_seed,ebn0_db,F,R,D,I,P,alpha,f_hz,trials,errors,bler,bler_ci_lo,bler_ci_hi,beta,eta_act,theta_bps,latency_s,p_dyn_w,early_terms,mode";

/// Decoder arrangement measured at one point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Setup {
    Unconstrained,
    Grandab { interval: u64 },
    Fifo(ScheduleConfig),
}

impl Setup {
    pub fn mode(&self) -> Mode {
        match self {
            Setup::Unconstrained => Mode::Unconstrained,
            Setup::Grandab { .. } => Mode::Grandab,
            Setup::Fifo(_) => Mode::Fifo,
        }
    }

    pub fn interval(&self) -> Option<u64> {
        match self {
            Setup::Unconstrained => None,
            Setup::Grandab { interval } => Some(*interval),
            Setup::Fifo(s) => Some(s.arrival_interval),
        }
    }

    /// `(mode, D, F, R, P, I)`; absent fields sort first.
    pub fn key(&self) -> SetupKey {
        match self {
            Setup::Unconstrained => SetupKey {
                mode: Mode::Unconstrained,
                ..SetupKey::default()
            },
            Setup::Grandab { interval } => SetupKey {
                mode: Mode::Grandab,
                parallelism: Some(1),
                interval: Some(*interval),
                ..SetupKey::default()
            },
            Setup::Fifo(s) => SetupKey {
                mode: Mode::Fifo,
                decoders: Some(s.num_decoders),
                fifo: Some(s.fifo_size),
                rob: Some(s.rob_size),
                parallelism: Some(s.data_parallelism),
                interval: Some(s.arrival_interval),
            },
        }
    }

    /// Short label such as `fifo_D1_F4_R4_P4_I10`.
    pub fn label(&self) -> String {
        match self {
            Setup::Unconstrained => "unconstrained".into(),
            Setup::Grandab { interval } => format!("grandab_I{interval}"),
            Setup::Fifo(s) => format!(
                "fifo_D{}_F{}_R{}_P{}_I{}",
                s.num_decoders, s.fifo_size, s.rob_size, s.data_parallelism, s.arrival_interval
            ),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetupKey {
    pub mode: Mode,
    pub decoders: Option<usize>,
    pub fifo: Option<usize>,
    pub rob: Option<usize>,
    pub parallelism: Option<u64>,
    pub interval: Option<u64>,
}

/// `Eb/N0` in micro-dB, used as an exact map key.
pub fn ebn0_key(ebn0_db: f64) -> i64 {
    (ebn0_db * 1e6).round() as i64
}

/// One line of a result CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub n: usize,
    pub k: usize,
    pub code_seed: u64,
    pub ebn0_db: f64,
    #[serde(rename = "F")]
    pub fifo_size: Option<usize>,
    #[serde(rename = "R")]
    pub rob_size: Option<usize>,
    #[serde(rename = "D")]
    pub num_decoders: Option<usize>,
    #[serde(rename = "I")]
    pub arrival_interval: Option<u64>,
    #[serde(rename = "P")]
    pub data_parallelism: Option<u64>,
    pub alpha: u32,
    pub f_hz: f64,
    pub trials: u64,
    pub errors: u64,
    pub bler: f64,
    pub bler_ci_lo: f64,
    pub bler_ci_hi: f64,
    /// Mean queries per codeword.
    pub beta: f64,
    pub eta_act: Option<f64>,
    /// Constant throughput, or average throughput for unconstrained rows.
    pub theta_bps: f64,
    pub latency_s: Option<f64>,
    pub p_dyn_w: Option<f64>,
    pub early_terms: u64,
    pub mode: Mode,
}

impl ResultRow {
    pub fn setup_key(&self) -> SetupKey {
        SetupKey {
            mode: self.mode,
            decoders: self.num_decoders,
            fifo: self.fifo_size,
            rob: self.rob_size,
            parallelism: self.data_parallelism,
            interval: self.arrival_interval,
        }
    }

    pub fn point_key(&self) -> (SetupKey, i64) {
        (self.setup_key(), ebn0_key(self.ebn0_db))
    }

    /// Canonical row order: setup parameters, then `Eb/N0`.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.setup_key()
            .cmp(&other.setup_key())
            .then(self.ebn0_db.total_cmp(&other.ebn0_db))
    }

    pub fn standard_error(&self) -> f64 {
        metrics::standard_error(self.errors, self.trials)
    }
}

/// Everything shared by the points of one experiment: the code, the trial
/// bank and the hardware model.
#[derive(Clone, Debug)]
pub struct Workbench {
    pub code: CodeSpec,
    pub bank: TrialBank,
    pub hardware: HardwareProfile,
    pub query_cap: u64,
}

/// Output of [`Workbench::run_point`].
#[derive(Clone, Debug)]
pub struct PointOutput {
    pub row: ResultRow,
    pub measurement: PointMeasurement,
    pub trace: Vec<TraceEvent>,
}

impl Workbench {
    pub fn new(code: CodeSpec, master_seed: u64, trials: usize, hardware: HardwareProfile, query_cap: u64) -> Result<Self> {
        hardware.validate()?;
        let bank = TrialBank::new(&code, master_seed, trials)?;
        Ok(Self {
            code,
            bank,
            hardware,
            query_cap,
        })
    }

    /// Builds the code and trial bank of a validated config. Relative matrix
    /// paths resolve against `base_dir`.
    pub fn from_config(cfg: &ExperimentConfig, base_dir: &Path) -> Result<Self> {
        cfg.validate()?;
        let code = cfg.code.build(base_dir)?;
        let trials = usize::try_from(cfg.trials).map_err(|_| Error::Config("trials: too large".into()))?;
        Self::new(code, cfg.master_seed, trials, cfg.hardware, cfg.query_cap)
    }

    pub fn trials(&self) -> u64 {
        self.bank.len() as u64
    }

    /// Runs one setup at one noise level.
    pub fn run_point(&self, setup: Setup, ebn0_db: f64, trace: bool) -> Result<PointOutput> {
        let ebn0_db = round_db(ebn0_db);
        let sigma2 = ebn0_to_sigma2(ebn0_db, self.code.rate())?;
        let stream = self.bank.llr_stream(sigma2)?;
        let hw = &self.hardware;
        let k = self.code.k();
        let (m, events, shape) = match setup {
            Setup::Unconstrained => (pipeline::run_unconstrained(&self.code, &self.bank, &stream, self.query_cap)?, Vec::new(), None),
            Setup::Grandab { interval } => {
                let m = pipeline::run_grandab(&self.code, &self.bank, &stream, hw.alpha, interval)?;
                (m, Vec::new(), Some((None, 1, interval)))
            }
            Setup::Fifo(s) => {
                if s.alpha != hw.alpha {
                    return Err(Error::Config(format!("schedule alpha {} differs from hardware alpha {}", s.alpha, hw.alpha)));
                }
                let (m, _, events) = pipeline::run_fifo(&self.code, &self.bank, &stream, s, trace)?;
                (m, events, Some((Some(s), s.data_parallelism, s.arrival_interval)))
            }
        };
        let (lo, hi) = metrics::bler_confidence(m.errors, m.trials);
        let (theta, eta, lat, pdyn) = match shape {
            None => (metrics::avg_throughput(hw.alpha, k, hw.clock_hz, m.beta), None, None, None),
            Some((_, p, i)) => (
                metrics::throughput(k, hw.clock_hz, i),
                Some(metrics::activity_factor(m.active_cycles_total, p, i, m.trials)),
                Some(metrics::latency(p, i, hw.clock_hz)),
                Some(pipeline::measured_power(&m, p, i, hw)),
            ),
        };
        let sched = shape.and_then(|(s, _, _)| s);
        let row = ResultRow {
            n: self.code.n(),
            k,
            code_seed: self.code.seed(),
            ebn0_db,
            fifo_size: sched.map(|s| s.fifo_size),
            rob_size: sched.map(|s| s.rob_size),
            num_decoders: sched.map(|s| s.num_decoders),
            arrival_interval: setup.interval(),
            data_parallelism: shape.map(|(_, p, _)| p),
            alpha: hw.alpha,
            f_hz: hw.clock_hz,
            trials: m.trials,
            errors: m.errors,
            bler: m.errors as f64 / m.trials.max(1) as f64,
            bler_ci_lo: lo,
            bler_ci_hi: hi,
            beta: m.beta,
            eta_act: eta,
            theta_bps: theta,
            latency_s: lat,
            p_dyn_w: pdyn,
            early_terms: m.early_terminations,
            mode: setup.mode(),
        };
        Ok(PointOutput {
            row,
            measurement: m,
            trace: events,
        })
    }
}

/// Runs one point of a config whose sweep lists all have length one.
pub fn run_point(cfg: &ExperimentConfig, base_dir: &Path) -> Result<ResultRow> {
    let setups = expand_setups(cfg)?;
    let grid = cfg.channel.resolve()?;
    if setups.len() != 1 || grid.len() != 1 {
        return Err(Error::Config(format!(
            "run_point needs scalar parameters, config expands to {} points",
            setups.len() * grid.len()
        )));
    }
    let bench = Workbench::from_config(cfg, base_dir)?;
    Ok(bench.run_point(setups[0], grid[0], false)?.row)
}

/// Decoder setups of a config in canonical order.
pub fn expand_setups(cfg: &ExperimentConfig) -> Result<Vec<Setup>> {
    let mut out = Vec::new();
    let mut modes = cfg.modes.clone();
    modes.sort();
    modes.dedup();
    for mode in modes {
        match mode {
            Mode::Unconstrained => out.push(Setup::Unconstrained),
            Mode::Grandab => {
                for &i in &cfg.schedule.arrival_interval {
                    out.push(Setup::Grandab { interval: i });
                }
            }
            Mode::Fifo => {
                for shape in cfg.schedule.shapes(cfg.hardware.alpha)? {
                    for &i in &cfg.schedule.arrival_interval {
                        out.push(Setup::Fifo(ScheduleConfig {
                            arrival_interval: i,
                            ..shape
                        }));
                    }
                }
            }
        }
    }
    out.sort_by_key(Setup::key);
    out.dedup_by_key(|s| s.key());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::ChannelGrid;

    fn bench(trials: usize) -> Workbench {
        let code = crate::generate_code(32, 26, 5).unwrap();
        Workbench::new(code, 11, trials, HardwareProfile::D1, 10_000).unwrap()
    }

    #[test]
    fn header_matches_row_fields() {
        let mut w = csv::Writer::from_writer(Vec::new());
        let row = bench(3).run_point(Setup::Unconstrained, 6.0, false).unwrap().row;
        w.serialize(&row).unwrap();
        let text = String::from_utf8(w.into_inner().unwrap()).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
        let back: ResultRow = csv::Reader::from_reader(text.as_bytes()).deserialize().next().unwrap().unwrap();
        assert_eq!(back, row);
    }

    #[test]
    fn fifo_row_fields() {
        let s = ScheduleConfig::symmetric(2, 1, 5, 4);
        let row = bench(50).run_point(Setup::Fifo(s), 5.0, false).unwrap().row;
        assert_eq!((row.fifo_size, row.rob_size, row.num_decoders, row.data_parallelism, row.arrival_interval), (Some(2), Some(2), Some(1), Some(2), Some(5)));
        assert_eq!(row.theta_bps, metrics::throughput(26, 746e6, 5));
        assert_eq!(row.latency_s, Some(10.0 / 746e6));
        let eta = row.eta_act.unwrap();
        assert!(eta > 0.0 && eta <= 1.0);
        assert!((row.p_dyn_w.unwrap() - eta * 86.1e-3).abs() < 1e-15);
    }

    #[test]
    fn canonical_setup_order() {
        let mut cfg = ExperimentConfig::from_toml("name = \"x\"\nmodes = [\"unconstrained\", \"fifo\", \"grandab\"]\n[channel]\nebn0_db = [1.0]\n[schedule]\nbuffers = [2, 1]\nnum_decoders = [2, 1]\narrival_interval = [10, 1]\n").unwrap();
        let labels: Vec<String> = expand_setups(&cfg).unwrap().iter().map(Setup::label).collect();
        assert_eq!(labels[0], "fifo_D1_F1_R1_P1_I1");
        assert_eq!(labels[1], "fifo_D1_F1_R1_P1_I10");
        assert_eq!(labels[7], "fifo_D2_F2_R2_P2_I10");
        assert_eq!(&labels[8..], ["unconstrained", "grandab_I1", "grandab_I10"]);
        cfg.channel = ChannelGrid::list(&[1.0, 2.0]);
        assert!(run_point(&cfg, Path::new(".")).is_err());
    }
}
