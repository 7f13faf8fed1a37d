//! `fifogrand run --config <file> [--preset <name>] [--trials N] [--seed S]
//! [--out <dir>] [--trace] [--workers W]`
//!
//! Exit codes: 0 success, 1 configuration error, 2 runtime failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fifogrand::harness::{preset, run_sweep, ExperimentConfig, RunOptions};

#[derive(Parser)]
#[command(name = "fifogrand", version, about = "ORBGRAND with FIFO scheduling: Monte-Carlo experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep or frontier experiment.
    Run {
        /// TOML experiment file. With --preset, its keys override the preset.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Named preset: fig1, fig4a, fig4b, fig4c, fig5a, fig5b, fig5c.
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        trials: Option<u64>,
        /// Master seed for information words and noise.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default: the config's `output.dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write per-cycle scheduler traces for FIFO points.
        #[arg(long)]
        trace: bool,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
}

fn merge(base: &mut toml::Table, over: toml::Table) {
    for (key, value) in over {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

fn load(config: Option<&Path>, preset_name: Option<&str>) -> Result<ExperimentConfig, String> {
    let mut table = match preset_name {
        Some(name) => toml::Table::try_from(preset(name).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?,
        None => toml::Table::new(),
    };
    match config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let over: toml::Table = text.parse().map_err(|e| format!("{}: {e}", path.display()))?;
            merge(&mut table, over);
        }
        None if preset_name.is_none() => return Err("give --config <file>, --preset <name>, or both".into()),
        None => {}
    }
    ExperimentConfig::from_toml(&toml::to_string(&table).map_err(|e| e.to_string())?).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let Command::Run {
        config,
        preset: preset_name,
        trials,
        seed,
        out,
        trace,
        workers,
    } = cli.command;

    let mut cfg = match load(config.as_deref(), preset_name.as_deref()) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("config error: {msg}");
            return ExitCode::from(1);
        }
    };
    if let Some(t) = trials {
        cfg.trials = t;
    }
    if let Some(s) = seed {
        cfg.master_seed = s;
    }
    if let Some(dir) = out {
        cfg.output.dir = dir;
    }
    if workers == 0 {
        eprintln!("config error: --workers must be at least 1");
        return ExitCode::from(1);
    }
    if let Err(e) = cfg.validate() {
        eprintln!("config error: {e}");
        return ExitCode::from(1);
    }
    let base_dir = config
        .as_deref()
        .and_then(Path::parent)
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    if let Err(e) = cfg.code.build(&base_dir) {
        eprintln!("config error: code: {e}");
        return ExitCode::from(1);
    }
    let opts = RunOptions {
        out_dir: cfg.output.dir.clone(),
        workers,
        trace,
        base_dir,
    };
    match run_sweep(&cfg, &opts) {
        Ok(report) => {
            println!("{} rows -> {}", report.rows.len(), report.csv_path.display());
            println!("metadata -> {}", report.meta_path.display());
            if let Some(f) = &report.frontier {
                let flagged = f.rows.iter().filter(|r| !r.bracketed).count();
                println!("frontier: {} rows, {flagged} unbracketed", f.rows.len());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("runtime error: {e}");
            ExitCode::from(2)
        }
    }
}
