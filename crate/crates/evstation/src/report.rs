//! Plot-ready tables from a finished batch directory.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

const STATS: [&str; 6] = ["mean", "q1", "median", "q3", "whisker_lo", "whisker_hi"];

#[derive(Debug, Deserialize)]
struct SummaryRecord {
    strategy: String,
    season: String,
    evs_per_day: f64,
    kpi: String,
    mean: Option<f64>,
    median: Option<f64>,
    q1: Option<f64>,
    q3: Option<f64>,
    whisker_lo: Option<f64>,
    whisker_hi: Option<f64>,
}

impl SummaryRecord {
    fn stat(&self, name: &str) -> Option<f64> {
        match name {
            "mean" => self.mean,
            "q1" => self.q1,
            "median" => self.median,
            "q3" => self.q3,
            "whisker_lo" => self.whisker_lo,
            _ => self.whisker_hi,
        }
    }
}

/// Pivots `summary.csv` in `dir` for one KPI: one row per season and EV
/// rate (ascending), one column per strategy and statistic.
pub fn report<W: Write>(dir: &Path, kpi: &str, out: W) -> Result<()> {
    let path = dir.join("summary.csv");
    let mut rdr = csv::Reader::from_path(&path)
        .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
    let mut strategies: Vec<String> = Vec::new();
    let mut seasons: Vec<String> = Vec::new();
    let mut table: BTreeMap<(usize, u64), BTreeMap<String, SummaryRecord>> = BTreeMap::new();
    for rec in rdr.deserialize() {
        let rec: SummaryRecord = rec.map_err(|e| Error::csv(&path, e))?;
        if rec.kpi != kpi {
            continue;
        }
        if !strategies.contains(&rec.strategy) {
            strategies.push(rec.strategy.clone());
        }
        let season = match seasons.iter().position(|s| *s == rec.season) {
            Some(i) => i,
            None => {
                seasons.push(rec.season.clone());
                seasons.len() - 1
            }
        };
        // non-negative floats order like their bit patterns
        table
            .entry((season, rec.evs_per_day.to_bits()))
            .or_default()
            .insert(rec.strategy.clone(), rec);
    }
    if table.is_empty() {
        return Err(Error::config(format!(
            "no rows for KPI `{kpi}` in {}",
            path.display()
        )));
    }

    let mut w = csv::Writer::from_writer(out);
    let err = |e| Error::csv(&path, e);
    let mut header = vec!["season".to_string(), "evs_per_day".to_string()];
    for s in &strategies {
        header.extend(STATS.iter().map(|st| format!("{s}_{st}")));
    }
    w.write_record(&header).map_err(err)?;
    for ((season, evs), by_strategy) in &table {
        let mut rec = vec![seasons[*season].clone(), f64::from_bits(*evs).to_string()];
        for s in &strategies {
            for st in STATS {
                let v = by_strategy.get(s).and_then(|r| r.stat(st));
                rec.push(v.map(|v| v.to_string()).unwrap_or_default());
            }
        }
        w.write_record(&rec).map_err(err)?;
    }
    w.flush().map_err(|e| Error::io(&path, e))
}
