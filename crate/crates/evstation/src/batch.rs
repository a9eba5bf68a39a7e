//! Monte Carlo grid over strategy, season and EV rate.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use evstation_core::engine::{run_simulation, RunOptions, RunOutput};
use evstation_core::seed::{derive_seed, tag_hash};
use evstation_core::stats::{summarize, BoxStats};
use evstation_core::{RunError, RunResult, ScenarioSpec, Strategy};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{BatchSection, Prepared};
use crate::error::{Error, Result};
use crate::formats::{create_output, Field, RESULT_FIELDS};

/// One point of the grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub strategy: Strategy,
    pub season: String,
    pub evs_per_day: f64,
}

/// Seed of run `run` of `(season, evs_per_day)`. Strategies share seeds so
/// they face identical EV demand.
pub fn run_seed(base_seed: u64, season: &str, evs_per_day: f64, run: u32) -> u64 {
    derive_seed(
        base_seed,
        &[tag_hash(season), evs_per_day.to_bits(), u64::from(run)],
    )
}

pub fn validate_batch(b: &BatchSection) -> Result<()> {
    if b.strategies.is_empty() || b.seasons.is_empty() || b.evs_per_day.is_empty() {
        return Err(Error::config("batch grid is empty"));
    }
    if b.runs_per_cell == 0 {
        return Err(Error::config("runs_per_cell must be at least 1"));
    }
    if b.workers == 0 {
        return Err(Error::config("workers must be at least 1"));
    }
    if let Some(r) = b
        .evs_per_day
        .iter()
        .find(|r| !(r.is_finite() && **r >= 0.0))
    {
        return Err(Error::config(format!("invalid evs_per_day {r}")));
    }
    Ok(())
}

fn cells(b: &BatchSection) -> Vec<Cell> {
    let mut out = Vec::new();
    for &strategy in &b.strategies {
        for season in &b.seasons {
            for &evs_per_day in &b.evs_per_day {
                out.push(Cell {
                    strategy,
                    season: season.clone(),
                    evs_per_day,
                });
            }
        }
    }
    out
}

/// A run that did not complete.
#[derive(Debug, Clone, Serialize)]
pub struct Abort {
    pub cell: usize,
    pub run: u32,
    pub seed: u64,
    pub scenario: bool,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct CellResults {
    pub cell: Cell,
    /// Completed runs in run-index order, with their seeds.
    pub runs: Vec<(u32, u64, RunResult)>,
    pub aborted: usize,
}

#[derive(Debug, Clone)]
pub struct BatchOutput {
    pub cells: Vec<CellResults>,
    pub aborts: Vec<Abort>,
}

impl BatchOutput {
    pub fn total_runs(&self) -> usize {
        self.cells.iter().map(|c| c.runs.len()).sum()
    }

    /// The error matching the aborts, if any: scenario failures take
    /// precedence over engine aborts.
    pub fn failure(&self) -> Option<Error> {
        let first = self.aborts.first()?;
        if let Some(a) = self.aborts.iter().find(|a| a.scenario) {
            return Some(Error::Scenario(format!(
                "run {} (seed {}): {}",
                a.run, a.seed, a.message
            )));
        }
        Some(Error::RunAbort {
            aborted: self.aborts.len(),
            first: format!("run {} (seed {}): {}", first.run, first.seed, first.message),
        })
    }
}

/// Scenario for one run of a cell.
pub fn scenario_spec(
    prep: &Prepared,
    season: &str,
    pv: Arc<[f64]>,
    evs: f64,
    seed: u64,
) -> ScenarioSpec {
    ScenarioSpec {
        season: season.into(),
        evs_per_day: evs,
        count_model: prep.count_model,
        pv,
        dists: prep.dists.clone(),
        horizon_days: prep.horizon_days,
        seed,
    }
}

/// Runs every cell of the grid on `batch.workers` threads. The output does
/// not depend on the worker count.
pub fn run_batch(prep: &Prepared, batch: &BatchSection) -> Result<BatchOutput> {
    validate_batch(batch)?;
    let mut pv = std::collections::BTreeMap::new();
    for season in &batch.seasons {
        pv.insert(season.as_str(), prep.pv_for(season, batch.base_seed)?);
    }
    let grid = cells(batch);
    let tasks: Vec<(usize, u32)> = (0..grid.len())
        .flat_map(|c| (0..batch.runs_per_cell).map(move |r| (c, r)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(batch.workers)
        .build()
        .map_err(|e| Error::config(format!("thread pool: {e}")))?;
    let outcomes: Vec<(u64, Result<RunOutput, RunError>)> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(c, run)| {
                let cell = &grid[c];
                let seed = run_seed(batch.base_seed, &cell.season, cell.evs_per_day, run);
                let spec = scenario_spec(
                    prep,
                    &cell.season,
                    pv[cell.season.as_str()].clone(),
                    cell.evs_per_day,
                    seed,
                );
                (
                    seed,
                    run_simulation(&prep.system, &spec, cell.strategy, RunOptions::default()),
                )
            })
            .collect()
    });

    let mut cells_out: Vec<CellResults> = grid
        .into_iter()
        .map(|cell| CellResults {
            cell,
            runs: Vec::new(),
            aborted: 0,
        })
        .collect();
    let mut aborts = Vec::new();
    for (&(c, run), (seed, outcome)) in tasks.iter().zip(outcomes) {
        match outcome {
            Ok(out) => cells_out[c].runs.push((run, seed, out.result)),
            Err(e) => {
                cells_out[c].aborted += 1;
                aborts.push(Abort {
                    cell: c,
                    run,
                    seed,
                    scenario: matches!(e, RunError::Scenario(_)),
                    message: e.to_string(),
                });
            }
        }
    }
    Ok(BatchOutput {
        cells: cells_out,
        aborts,
    })
}

fn fmt_evs(v: f64) -> String {
    format!("{v}")
}

/// Writes `runs.csv`: one row per completed run.
pub fn write_runs_csv(path: &Path, out: &BatchOutput) -> Result<()> {
    let mut w = create_output(path)?;
    let io = |e| Error::io(path, e);
    let names: Vec<&str> = RESULT_FIELDS.iter().map(|(n, _)| *n).collect();
    writeln!(
        w,
        "strategy,season,evs_per_day,run,seed,{}",
        names.join(",")
    )
    .map_err(io)?;
    for c in &out.cells {
        for (run, seed, r) in &c.runs {
            write!(
                w,
                "{},{},{},{run},{seed}",
                c.cell.strategy,
                c.cell.season,
                fmt_evs(c.cell.evs_per_day)
            )
            .map_err(io)?;
            for (_, get) in RESULT_FIELDS {
                write!(w, ",{}", get(r)).map_err(io)?;
            }
            writeln!(w).map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

/// Box statistics of one KPI in one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub cell: Cell,
    pub kpi: &'static str,
    pub aborted: usize,
    pub stats: Option<BoxStats>,
}

pub fn summarize_batch(out: &BatchOutput) -> Vec<SummaryRow> {
    let mut rows = Vec::new();
    for c in &out.cells {
        for (name, get) in RESULT_FIELDS {
            let values: Vec<f64> = c.runs.iter().map(|(_, _, r)| get(r).as_f64()).collect();
            rows.push(SummaryRow {
                cell: c.cell.clone(),
                kpi: name,
                aborted: c.aborted,
                stats: summarize(&values),
            });
        }
    }
    rows
}

pub const SUMMARY_HEADER: &str =
    "strategy,season,evs_per_day,kpi,n,aborted,mean,median,q1,q3,whisker_lo,whisker_hi,min,max";

/// Writes `summary.csv`. Cells without completed runs get empty statistics.
pub fn write_summary_csv(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut w = create_output(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "{SUMMARY_HEADER}").map_err(io)?;
    for r in rows {
        let c = &r.cell;
        write!(
            w,
            "{},{},{},{}",
            c.strategy,
            c.season,
            fmt_evs(c.evs_per_day),
            r.kpi
        )
        .map_err(io)?;
        match &r.stats {
            Some(s) => writeln!(
                w,
                ",{},{},{},{},{},{},{},{},{},{}",
                s.n,
                r.aborted,
                Field::Float(s.mean),
                s.median,
                s.q1,
                s.q3,
                s.whisker_lo,
                s.whisker_hi,
                s.min,
                s.max
            ),
            None => writeln!(w, ",0,{},,,,,,,,", r.aborted),
        }
        .map_err(io)?;
    }
    w.flush().map_err(io)
}
