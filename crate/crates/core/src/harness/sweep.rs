//! Sweep execution: worker pool, streamed CSV, resume marker and metadata.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Analysis, ExperimentConfig};
use super::frontier::{find_operating_frontier, max_throughput_for_loss, Evaluator, Frontier, MaxThroughputRow};
use super::point::{expand_setups, ResultRow, Setup, Workbench};
use super::presets::PRESET_VERSION;
use crate::error::{Error, Result};
use crate::scheduler::format_trace;

/// Interpolation note recorded in every metadata file.
pub const INTERPOLATION_NOTE: &str =
    "log-linear: log10(BLER) interpolated linearly in Eb/N0 between the bracketing points; a zero-error point counts as 0.5 errors";
/// Pairing note recorded in every metadata file.
pub const PAIRING_NOTE: &str =
    "paired: trial i uses the same information word and the same standard-normal noise draws in every row (scaled by sigma)";

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// Worker threads; at least 1.
    pub workers: usize,
    /// Write a cycle trace per FIFO point.
    pub trace: bool,
    /// Base for relative paths inside the config.
    pub base_dir: PathBuf,
}

impl RunOptions {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        Self {
            out_dir: out_dir.into(),
            workers: 1,
            trace: false,
            base_dir: PathBuf::from("."),
        }
    }
}

/// Files and rows produced by [`run_sweep`].
#[derive(Clone, Debug)]
pub struct SweepReport {
    pub rows: Vec<ResultRow>,
    pub csv_path: PathBuf,
    pub meta_path: PathBuf,
    pub frontier: Option<Frontier>,
    pub max_throughput: Vec<MaxThroughputRow>,
    /// Points restored from an interrupted run.
    pub resumed_rows: usize,
}

#[derive(Serialize, Deserialize)]
struct ResumeMarker {
    config: String,
    wall_clock_s: BTreeMap<String, f64>,
}

#[derive(Serialize)]
struct RowTiming {
    setup: String,
    ebn0_db: f64,
    wall_clock_s: f64,
}

#[derive(Serialize)]
struct Metadata<'a> {
    name: &'a str,
    preset_version: &'static str,
    crate_version: &'static str,
    config: &'a ExperimentConfig,
    code_seed: u64,
    code_n: usize,
    code_k: usize,
    master_seed: u64,
    trials: u64,
    interpolation: &'static str,
    pairing: &'static str,
    csv_header: &'static str,
    rows: Vec<RowTiming>,
    total_wall_clock_s: f64,
    resumed_rows: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    frontier: Option<&'a Frontier>,
    #[serde(skip_serializing_if = "<[_]>::is_empty")]
    max_throughput: &'a [MaxThroughputRow],
}

fn timing_key(row: &ResultRow) -> String {
    format!("{:?}@{}", row.setup_key(), row.ebn0_db)
}

fn label_of(row: &ResultRow) -> String {
    let mut parts = vec![row.mode.name().to_string()];
    let fields = [
        ("D", row.num_decoders.map(|v| v as u64)),
        ("F", row.fifo_size.map(|v| v as u64)),
        ("R", row.rob_size.map(|v| v as u64)),
        ("P", row.data_parallelism),
        ("I", row.arrival_interval),
    ];
    for (name, v) in fields {
        if let Some(v) = v {
            parts.push(format!("{name}{v}"));
        }
    }
    parts.join("_")
}

struct Paths {
    csv: PathBuf,
    meta: PathBuf,
    marker: PathBuf,
    frontier: PathBuf,
    max_throughput: PathBuf,
    trace_dir: PathBuf,
}

impl Paths {
    fn new(dir: &Path, name: &str) -> Self {
        Self {
            csv: dir.join(format!("{name}.csv")),
            meta: dir.join(format!("{name}.json")),
            marker: dir.join(format!("{name}.resume.json")),
            frontier: dir.join(format!("{name}_frontier.csv")),
            max_throughput: dir.join(format!("{name}_max_throughput.csv")),
            trace_dir: dir.join(format!("{name}_trace")),
        }
    }
}

/// Appends rows to the CSV and keeps the resume marker current.
struct Progress {
    csv: csv::Writer<File>,
    marker_path: PathBuf,
    marker: ResumeMarker,
}

impl Progress {
    fn record(&mut self, row: &ResultRow, wall: f64) -> Result<()> {
        self.csv.serialize(row)?;
        self.csv.flush()?;
        self.marker.wall_clock_s.insert(timing_key(row), wall);
        write_atomic(&self.marker_path, serde_json::to_string(&self.marker)?.as_bytes())
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    write_atomic(path, &bytes)
}

/// Rows already on disk from an interrupted run of the same resolved config.
fn restore(paths: &Paths, config_text: &str) -> Result<(Vec<ResultRow>, BTreeMap<String, f64>)> {
    let Ok(text) = fs::read_to_string(&paths.marker) else {
        return Ok((Vec::new(), BTreeMap::new()));
    };
    let Ok(marker) = serde_json::from_str::<ResumeMarker>(&text) else {
        return Ok((Vec::new(), BTreeMap::new()));
    };
    if marker.config != config_text || !paths.csv.exists() {
        return Ok((Vec::new(), BTreeMap::new()));
    }
    let mut rows = Vec::new();
    for row in csv::Reader::from_path(&paths.csv)?.deserialize() {
        match row {
            Ok(r) => rows.push(r),
            // a torn final line from the interruption
            Err(_) => break,
        }
    }
    Ok((rows, marker.wall_clock_s))
}

/// Runs every point of `cfg` and writes `<name>.csv` plus `<name>.json`.
///
/// Sweep analyses evaluate the Cartesian product of setups and `Eb/N0`
/// values. Frontier analyses search the operating point of every setup and
/// also write `<name>_frontier.csv` and, with loss targets,
/// `<name>_max_throughput.csv`. While running, `<name>.resume.json` marks the
/// CSV as partial; rerunning the same config continues from it.
pub fn run_sweep(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<SweepReport> {
    cfg.validate()?;
    let setups = expand_setups(cfg)?;
    let bench = Workbench::from_config(cfg, &opts.base_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("workers: {e}")))?;

    fs::create_dir_all(&opts.out_dir)?;
    let paths = Paths::new(&opts.out_dir, &cfg.name);
    let config_text = cfg.to_toml();
    let (restored, timings) = restore(&paths, &config_text)?;
    let resumed_rows = restored.len();

    let mut csv = csv::Writer::from_path(&paths.csv)?;
    for r in &restored {
        csv.serialize(r)?;
    }
    csv.flush()?;
    let mut progress = Progress {
        csv,
        marker_path: paths.marker.clone(),
        marker: ResumeMarker {
            config: config_text,
            wall_clock_s: timings,
        },
    };
    write_atomic(&paths.marker, serde_json::to_string(&progress.marker)?.as_bytes())?;

    let start = Instant::now();
    let (rows, frontier, max_tp, timings) = match cfg.analysis {
        Analysis::Sweep => {
            let grid = cfg.channel.resolve()?;
            let done: BTreeMap<_, ResultRow> = restored.into_iter().map(|r| (r.point_key(), r)).collect();
            let todo: Vec<(Setup, f64)> = setups
                .iter()
                .flat_map(|&s| grid.iter().map(move |&x| (s, x)))
                .filter(|(s, x)| !done.contains_key(&(s.key(), super::point::ebn0_key(*x))))
                .collect();
            let mut rows: Vec<ResultRow> = done.into_values().collect();
            if opts.trace {
                fs::create_dir_all(&paths.trace_dir)?;
            }
            for chunk in todo.chunks(opts.workers.max(1)) {
                let results = pool.install(|| {
                    chunk
                        .par_iter()
                        .map(|&(s, x)| {
                            let t = Instant::now();
                            let out = bench.run_point(s, x, opts.trace)?;
                            Ok((out, t.elapsed().as_secs_f64()))
                        })
                        .collect::<Result<Vec<_>>>()
                })?;
                for (out, wall) in results {
                    if opts.trace && matches!(out.row.mode, super::config::Mode::Fifo) {
                        let file = paths.trace_dir.join(format!("{}_ebn0_{}.txt", label_of(&out.row), out.row.ebn0_db));
                        fs::write(file, format_trace(&out.trace))?;
                    }
                    progress.record(&out.row, wall)?;
                    rows.push(out.row);
                }
            }
            (rows, None, Vec::new(), progress.marker.wall_clock_s)
        }
        Analysis::Frontier => {
            let progress = Mutex::new(progress);
            let eval = Evaluator::new(&bench).with_sink(|row, wall| progress.lock().expect("progress lock").record(row, wall));
            eval.preload(restored);
            let frontier = pool.install(|| find_operating_frontier(&eval, &setups, &cfg.frontier))?;
            let rows = eval.rows();
            drop(eval);
            let progress = progress.into_inner().expect("progress lock");
            let max_tp: Vec<MaxThroughputRow> = cfg
                .frontier
                .loss_targets_db
                .iter()
                .flat_map(|&l| max_throughput_for_loss(&frontier, l))
                .collect();
            write_rows(&paths.frontier, &frontier.rows)?;
            if !max_tp.is_empty() {
                write_rows(&paths.max_throughput, &max_tp)?;
            }
            (rows, Some(frontier), max_tp, progress.marker.wall_clock_s)
        }
    };

    let mut rows = rows;
    rows.sort_by(ResultRow::canonical_cmp);
    write_rows(&paths.csv, &rows)?;
    let meta = Metadata {
        name: &cfg.name,
        preset_version: PRESET_VERSION,
        crate_version: env!("CARGO_PKG_VERSION"),
        config: cfg,
        code_seed: bench.code.seed(),
        code_n: bench.code.n(),
        code_k: bench.code.k(),
        master_seed: cfg.master_seed,
        trials: cfg.trials,
        interpolation: INTERPOLATION_NOTE,
        pairing: PAIRING_NOTE,
        csv_header: super::point::CSV_HEADER,
        rows: rows
            .iter()
            .map(|r| RowTiming {
                setup: label_of(r),
                ebn0_db: r.ebn0_db,
                wall_clock_s: timings.get(&timing_key(r)).copied().unwrap_or(0.0),
            })
            .collect(),
        total_wall_clock_s: start.elapsed().as_secs_f64(),
        resumed_rows,
        frontier: frontier.as_ref(),
        max_throughput: &max_tp,
    };
    let mut json = serde_json::to_vec_pretty(&meta)?;
    json.push(b'\n');
    write_atomic(&paths.meta, &json)?;
    fs::remove_file(&paths.marker)?;

    Ok(SweepReport {
        rows,
        csv_path: paths.csv,
        meta_path: paths.meta,
        frontier,
        max_throughput: max_tp,
        resumed_rows,
    })
}
