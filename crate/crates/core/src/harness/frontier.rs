//! Operating-point search and throughput/loss frontiers.

use std::collections::BTreeMap;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{round_db, FrontierParams, Mode};
use super::point::{ebn0_key, ResultRow, Setup, SetupKey, Workbench};
use crate::error::{Error, Result};
use crate::metrics::{self, BlerCurve, BlerPoint};

type Sink<'a> = Box<dyn FnMut(&ResultRow, f64) -> Result<()> + Send + 'a>;

/// Memoizing front end to [`Workbench::run_point`]. Safe to share between
/// worker threads; a point is measured at most once.
pub struct Evaluator<'a> {
    bench: &'a Workbench,
    cache: Mutex<BTreeMap<(SetupKey, i64), ResultRow>>,
    sink: Option<Mutex<Sink<'a>>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(bench: &'a Workbench) -> Self {
        Self {
            bench,
            cache: Mutex::new(BTreeMap::new()),
            sink: None,
        }
    }

    /// Calls `sink(row, wall_clock_s)` for every newly measured row.
    pub fn with_sink(mut self, sink: impl FnMut(&ResultRow, f64) -> Result<()> + Send + 'a) -> Self {
        self.sink = Some(Mutex::new(Box::new(sink)));
        self
    }

    /// Seeds the cache with rows measured earlier (for example on resume).
    pub fn preload(&self, rows: impl IntoIterator<Item = ResultRow>) {
        let mut cache = self.cache.lock().expect("cache lock");
        for row in rows {
            cache.insert(row.point_key(), row);
        }
    }

    pub fn bench(&self) -> &Workbench {
        self.bench
    }

    pub fn measure(&self, setup: Setup, ebn0_db: f64) -> Result<ResultRow> {
        let ebn0_db = round_db(ebn0_db);
        let key = (setup.key(), ebn0_key(ebn0_db));
        if let Some(row) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(row.clone());
        }
        let start = std::time::Instant::now();
        let row = self.bench.run_point(setup, ebn0_db, false)?.row;
        let elapsed = start.elapsed().as_secs_f64();
        let mut cache = self.cache.lock().expect("cache lock");
        if let Some(existing) = cache.get(&key) {
            return Ok(existing.clone());
        }
        cache.insert(key, row.clone());
        if let Some(sink) = &self.sink {
            (sink.lock().expect("sink lock"))(&row, elapsed)?;
        }
        Ok(row)
    }

    /// All measured rows in canonical order.
    pub fn rows(&self) -> Vec<ResultRow> {
        self.cache.lock().expect("cache lock").values().cloned().collect()
    }

    /// Measured rows of one setup, ordered by `Eb/N0`.
    pub fn curve_rows(&self, setup: &Setup) -> Vec<ResultRow> {
        let key = setup.key();
        self.cache
            .lock()
            .expect("cache lock")
            .range((key, i64::MIN)..=(key, i64::MAX))
            .map(|(_, r)| r.clone())
            .collect()
    }
}

/// Located target-BLER point of one setup.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OperatingPoint {
    /// Interpolated `Eb/N0`; `None` if the search range did not bracket it.
    pub ebn0_db: Option<f64>,
    /// Closest measured point when unbracketed.
    pub nearest_db: f64,
    /// Mean queries per codeword at the operating point (log-interpolated).
    pub beta: Option<f64>,
    pub eta_act: Option<f64>,
    pub p_dyn_w: Option<f64>,
    pub bracketed: bool,
}

fn snap(x: f64, step: f64) -> f64 {
    round_db((x / step).round() * step)
}

/// Finds where `setup` reaches the target BLER. Starts at `start_db`, walks
/// the coarse grid until the target is bracketed, then fills the bracket at
/// the fine step and interpolates log-linearly.
pub fn search_operating_point(eval: &Evaluator, setup: Setup, params: &FrontierParams, start_db: f64) -> Result<OperatingPoint> {
    params.validate()?;
    let (coarse, fine, target) = (params.coarse_step_db, params.fine_step_db, params.target_bler);
    let eps = 1e-9;
    let unbracketed = |nearest_db: f64| OperatingPoint {
        ebn0_db: None,
        nearest_db,
        beta: None,
        eta_act: None,
        p_dyn_w: None,
        bracketed: false,
    };
    let mut x = snap(start_db, coarse).clamp(params.min_db, params.max_db);
    let (lo, hi);
    if eval.measure(setup, x)?.bler > target {
        loop {
            let next = round_db(x + coarse);
            if next > params.max_db + eps {
                return Ok(unbracketed(x));
            }
            if eval.measure(setup, next)?.bler <= target {
                (lo, hi) = (x, next);
                break;
            }
            x = next;
        }
    } else {
        loop {
            let prev = round_db(x - coarse);
            if prev < params.min_db - eps {
                return Ok(unbracketed(x));
            }
            if eval.measure(setup, prev)?.bler > target {
                (lo, hi) = (prev, x);
                break;
            }
            x = prev;
        }
    }
    let mut j = 1;
    while lo + j as f64 * fine < hi - eps {
        eval.measure(setup, lo + j as f64 * fine)?;
        j += 1;
    }
    let rows: Vec<ResultRow> = eval
        .curve_rows(&setup)
        .into_iter()
        .filter(|r| r.ebn0_db >= lo - eps && r.ebn0_db <= hi + eps)
        .collect();
    let curve = BlerCurve::new(
        rows.iter()
            .map(|r| BlerPoint {
                ebn0_db: r.ebn0_db,
                trials: r.trials,
                errors: r.errors,
            })
            .collect(),
    )?;
    let op = metrics::operating_point(&curve, target)?;
    let (a, b) = bracket_rows(&rows, op);
    let t = if b.ebn0_db > a.ebn0_db { (op - a.ebn0_db) / (b.ebn0_db - a.ebn0_db) } else { 0.0 };
    let lerp = |u: f64, v: f64| u + t * (v - u);
    let beta = (lerp(a.beta.max(1e-300).ln(), b.beta.max(1e-300).ln())).exp();
    Ok(OperatingPoint {
        ebn0_db: Some(op),
        nearest_db: op,
        beta: Some(beta),
        eta_act: a.eta_act.zip(b.eta_act).map(|(u, v)| lerp(u, v)),
        p_dyn_w: a.p_dyn_w.zip(b.p_dyn_w).map(|(u, v)| lerp(u, v)),
        bracketed: true,
    })
}

fn bracket_rows(rows: &[ResultRow], op: f64) -> (&ResultRow, &ResultRow) {
    for w in rows.windows(2) {
        if w[0].ebn0_db <= op && op <= w[1].ebn0_db {
            return (&w[0], &w[1]);
        }
    }
    let last = &rows[rows.len() - 1];
    (last, last)
}

/// One setup's position on the throughput/loss plane.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrontierRow {
    pub mode: Mode,
    #[serde(rename = "F")]
    pub fifo_size: Option<usize>,
    #[serde(rename = "R")]
    pub rob_size: Option<usize>,
    #[serde(rename = "D")]
    pub num_decoders: Option<usize>,
    #[serde(rename = "P")]
    pub data_parallelism: Option<u64>,
    #[serde(rename = "I")]
    pub arrival_interval: Option<u64>,
    pub theta_bps: f64,
    pub op_db: Option<f64>,
    pub unc_op_db: f64,
    pub loss_db: Option<f64>,
    pub beta_op: Option<f64>,
    pub latency_s: Option<f64>,
    pub p_dyn_w: Option<f64>,
    pub bracketed: bool,
    pub nearest_db: f64,
}

impl FrontierRow {
    /// Key of the setup family this row belongs to (everything except `I`).
    pub fn family(&self) -> SetupKey {
        SetupKey {
            mode: self.mode,
            decoders: self.num_decoders,
            fifo: self.fifo_size,
            rob: self.rob_size,
            parallelism: self.data_parallelism,
            interval: None,
        }
    }
}

/// Unconstrained reference and the frontier rows.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Frontier {
    pub target_bler: f64,
    pub baseline: OperatingPoint,
    /// Average throughput of the unconstrained decoder at its operating point.
    pub baseline_avg_throughput_bps: Option<f64>,
    pub rows: Vec<FrontierRow>,
}

impl Frontier {
    pub fn row(&self, setup: &Setup) -> Option<&FrontierRow> {
        let key = setup.key();
        self.rows.iter().find(|r| {
            SetupKey {
                interval: r.arrival_interval,
                ..r.family()
            } == key
        })
    }
}

/// The unconstrained operating point; errors if it is not bracketed.
pub fn baseline(eval: &Evaluator, params: &FrontierParams) -> Result<OperatingPoint> {
    let op = search_operating_point(eval, Setup::Unconstrained, params, params.start_db)?;
    if !op.bracketed {
        return Err(Error::OutOfRange {
            target: params.target_bler,
            nearest_db: op.nearest_db,
        });
    }
    Ok(op)
}

/// Operating point and loss of each setup against the unconstrained decoder
/// on the same code and trials. Setups are searched in parallel on the
/// current rayon pool; rows come back in canonical order.
pub fn find_operating_frontier(eval: &Evaluator, setups: &[Setup], params: &FrontierParams) -> Result<Frontier> {
    let base = baseline(eval, params)?;
    let unc_op = base.ebn0_db.expect("bracketed");
    let start = round_db((unc_op / params.coarse_step_db).floor() * params.coarse_step_db);
    let mut ordered: Vec<Setup> = setups.iter().copied().filter(|s| *s != Setup::Unconstrained).collect();
    ordered.sort_by_key(Setup::key);
    ordered.dedup();
    let rows = ordered
        .par_iter()
        .map(|&s| frontier_row(eval, s, params, start, unc_op))
        .collect::<Result<Vec<_>>>()?;
    let hw = eval.bench().hardware;
    let k = eval.bench().code.k();
    Ok(Frontier {
        target_bler: params.target_bler,
        baseline_avg_throughput_bps: base.beta.map(|b| metrics::avg_throughput(hw.alpha, k, hw.clock_hz, b)),
        baseline: base,
        rows,
    })
}

/// Measures one setup's frontier row given the unconstrained operating point.
pub fn frontier_row(eval: &Evaluator, setup: Setup, params: &FrontierParams, start_db: f64, unc_op_db: f64) -> Result<FrontierRow> {
    let op = search_operating_point(eval, setup, params, start_db)?;
    let hw = eval.bench().hardware;
    let k = eval.bench().code.k();
    let interval = setup.interval().unwrap_or(1);
    let (f, r, d, p) = match setup {
        Setup::Fifo(s) => (Some(s.fifo_size), Some(s.rob_size), Some(s.num_decoders), Some(s.data_parallelism)),
        _ => (None, None, None, None),
    };
    Ok(FrontierRow {
        mode: setup.mode(),
        fifo_size: f,
        rob_size: r,
        num_decoders: d,
        data_parallelism: p,
        arrival_interval: setup.interval(),
        theta_bps: metrics::throughput(k, hw.clock_hz, interval),
        op_db: op.ebn0_db,
        unc_op_db,
        loss_db: op.ebn0_db.map(|x| metrics::ebn0_loss(x, unc_op_db)),
        beta_op: op.beta,
        latency_s: Some(metrics::latency(p.unwrap_or(1), interval, hw.clock_hz)),
        p_dyn_w: op.p_dyn_w,
        bracketed: op.bracketed,
        nearest_db: op.nearest_db,
    })
}

/// Highest constant throughput of one setup family within a loss budget.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaxThroughputRow {
    pub loss_target_db: f64,
    pub mode: Mode,
    #[serde(rename = "F")]
    pub fifo_size: Option<usize>,
    #[serde(rename = "R")]
    pub rob_size: Option<usize>,
    #[serde(rename = "D")]
    pub num_decoders: Option<usize>,
    #[serde(rename = "P")]
    pub data_parallelism: Option<u64>,
    #[serde(rename = "I")]
    pub arrival_interval: Option<u64>,
    pub theta_bps: Option<f64>,
    pub loss_db: Option<f64>,
    pub latency_s: Option<f64>,
    pub p_dyn_w: Option<f64>,
    /// False when no interval on the grid met the budget.
    pub found: bool,
}

/// For each setup family, the smallest measured `I` whose loss is within
/// `loss_target_db`.
pub fn max_throughput_for_loss(frontier: &Frontier, loss_target_db: f64) -> Vec<MaxThroughputRow> {
    let mut families: BTreeMap<SetupKey, Vec<&FrontierRow>> = BTreeMap::new();
    for row in &frontier.rows {
        families.entry(row.family()).or_default().push(row);
    }
    families
        .into_values()
        .map(|mut rows| {
            rows.sort_by_key(|r| r.arrival_interval);
            let best = rows
                .iter()
                .find(|r| r.bracketed && r.loss_db.is_some_and(|l| l <= loss_target_db + 1e-9));
            let any = rows[0];
            MaxThroughputRow {
                loss_target_db,
                mode: any.mode,
                fifo_size: any.fifo_size,
                rob_size: any.rob_size,
                num_decoders: any.num_decoders,
                data_parallelism: any.data_parallelism,
                arrival_interval: best.and_then(|r| r.arrival_interval),
                theta_bps: best.map(|r| r.theta_bps),
                loss_db: best.and_then(|r| r.loss_db),
                latency_s: best.and_then(|r| r.latency_s),
                p_dyn_w: best.and_then(|r| r.p_dyn_w),
                found: best.is_some(),
            }
        })
        .collect()
}
