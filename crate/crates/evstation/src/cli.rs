//! Command-line interface.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use evstation_core::engine::{run_simulation, RunOptions};
use evstation_core::Strategy;
use serde::Serialize;

use crate::batch::{
    run_batch, run_seed, scenario_spec, summarize_batch, validate_batch, write_runs_csv,
    write_summary_csv, Abort, BatchOutput,
};
use crate::config::{BatchFile, BatchSection, Prepared, RunConfig};
use crate::error::{Error, Result};
use crate::formats::{write_json, write_trace};
use crate::report::report;

#[derive(Debug, Parser)]
#[command(
    name = "evstation",
    version,
    about = "Multi-string battery fast-charging station simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one grid cell.
    Simulate {
        /// Run configuration (TOML). Built-in defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        strategy: Strategy,
        #[arg(long)]
        season: String,
        #[arg(long)]
        evs_per_day: f64,
        #[arg(long, default_value_t = 1)]
        runs: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Also write the per-minute trace of run 0.
        #[arg(long)]
        trace: bool,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Run the full grid of a batch file.
    Sweep {
        #[arg(long)]
        batch: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print one KPI of a batch directory as plot-ready CSV.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        kpi: String,
        /// Write here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct Meta<'a> {
    version: &'static str,
    command: &'static str,
    base_seed: u64,
    placeholder_distributions: bool,
    config: &'a RunConfig,
    batch: &'a BatchSection,
    pv_sources: BTreeMap<&'a str, String>,
    runs_completed: usize,
    aborts: &'a [Abort],
}

fn write_outputs(
    out_dir: &Path,
    command: &'static str,
    config: &RunConfig,
    prep: &Prepared,
    batch: &BatchSection,
    result: &BatchOutput,
) -> Result<()> {
    write_runs_csv(&out_dir.join("runs.csv"), result)?;
    write_summary_csv(&out_dir.join("summary.csv"), &summarize_batch(result))?;
    let meta = Meta {
        version: env!("CARGO_PKG_VERSION"),
        command,
        base_seed: batch.base_seed,
        placeholder_distributions: prep.dists.placeholder,
        config,
        batch,
        pv_sources: batch
            .seasons
            .iter()
            .map(|s| (s.as_str(), prep.pv_source(s)))
            .collect(),
        runs_completed: result.total_runs(),
        aborts: &result.aborts,
    };
    write_json(&out_dir.join("meta.json"), &meta)
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn batch_in(
    config: &RunConfig,
    batch: &BatchSection,
    out: &Path,
    command: &'static str,
) -> Result<(Prepared, BatchOutput)> {
    validate_batch(batch)?;
    let prep = config.prepare()?;
    let result = run_batch(&prep, batch)?;
    create_dir(out)?;
    write_outputs(out, command, config, &prep, batch, &result)?;
    Ok((prep, result))
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            config,
            strategy,
            season,
            evs_per_day,
            runs,
            seed,
            out,
            trace,
            workers,
        } => {
            let config = match config {
                Some(p) => RunConfig::load(&p)?,
                None => RunConfig::default(),
            };
            let batch = BatchSection {
                strategies: vec![strategy],
                seasons: vec![season.clone()],
                evs_per_day: vec![evs_per_day],
                runs_per_cell: runs,
                base_seed: seed,
                workers,
            };
            let (prep, result) = batch_in(&config, &batch, &out, "simulate")?;
            if trace {
                let pv = prep.pv_for(&season, seed)?;
                let spec = scenario_spec(
                    &prep,
                    &season,
                    pv,
                    evs_per_day,
                    run_seed(seed, &season, evs_per_day, 0),
                );
                if let Ok(o) =
                    run_simulation(&prep.system, &spec, strategy, RunOptions { trace: true })
                {
                    write_trace(
                        &out.join("trace.csv"),
                        o.trace.as_deref().unwrap_or_default(),
                    )?;
                }
            }
            result.failure().map_or(Ok(()), Err)
        }
        Command::Sweep { batch, out } => {
            let file = BatchFile::load(&batch)?;
            let (_, result) = batch_in(&file.run, &file.batch, &out, "sweep")?;
            result.failure().map_or(Ok(()), Err)
        }
        Command::Report { input, kpi, out } => match out {
            Some(p) => report(&input, &kpi, crate::formats::create_output(&p)?),
            None => report(&input, &kpi, std::io::stdout().lock()),
        },
    }
}
