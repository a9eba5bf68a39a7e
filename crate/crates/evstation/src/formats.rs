//! Input tables and output files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use chrono::{DateTime, NaiveDateTime};
use evstation_core::scenario::{resample_to_minutes, DomainUnit, TabulatedPdf};
use evstation_core::{ComponentId, RunResult, TraceRow};
use serde::Deserialize;

use crate::error::{Error, Result};

fn open_input(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path)
        .map_err(|e| Error::config(format!("cannot open {}: {e}", path.display())))?;
    Ok(csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn expect_header(path: &Path, rdr: &mut csv::Reader<File>, want: &[&str]) -> Result<()> {
    let got = rdr.headers().map_err(|e| Error::csv(path, e))?;
    if got.iter().ne(want.iter().copied()) {
        return Err(Error::Scenario(format!(
            "{}: header must be `{}`, found `{}`",
            path.display(),
            want.join(","),
            got.iter().collect::<Vec<_>>().join(",")
        )));
    }
    Ok(())
}

/// Line number of a record for error messages (header is line 1).
fn line_of(rec: &csv::StringRecord, fallback: usize) -> u64 {
    rec.position().map_or(fallback as u64 + 2, |p| p.line())
}

#[derive(Deserialize)]
struct DensityRow {
    value: f64,
    density: f64,
}

/// Reads a `value,density` table.
pub fn load_distribution_csv(path: &Path, unit: DomainUnit) -> Result<TabulatedPdf> {
    let mut rdr = open_input(path)?;
    expect_header(path, &mut rdr, &["value", "density"])?;
    let headers = rdr.headers().map_err(|e| Error::csv(path, e))?.clone();
    let mut points = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::csv(path, e))?;
        let row: DensityRow = rec.deserialize(Some(&headers)).map_err(|e| {
            Error::Scenario(format!("{} line {}: {e}", path.display(), line_of(&rec, i)))
        })?;
        points.push((row.value, row.density));
    }
    TabulatedPdf::new(&points, unit)
        .map_err(|e| Error::Scenario(format!("{}: {e}", path.display())))
}

/// Parses an ISO 8601 timestamp to Unix seconds. An offset is honoured if
/// present; naive timestamps are read as UTC.
pub fn parse_timestamp(s: &str) -> Option<i64> {
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.timestamp());
    }
    [
        "%Y-%m-%dT%H:%M:%S%.f",
        "%Y-%m-%d %H:%M:%S%.f",
        "%Y-%m-%dT%H:%M",
    ]
    .iter()
    .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
    .map(|t| t.and_utc().timestamp())
}

/// Reads a `timestamp_iso8601,power_kw` series and resamples it to one
/// value per minute. Production may be given positive or, following the
/// intake-negative convention, non-positive throughout.
pub fn load_pv_csv(path: &Path) -> Result<Vec<f64>> {
    let mut rdr = open_input(path)?;
    expect_header(path, &mut rdr, &["timestamp_iso8601", "power_kw"])?;
    let mut samples = Vec::new();
    let mut lines = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::csv(path, e))?;
        let line = line_of(&rec, i);
        let bad = |what: &str| Error::Scenario(format!("{} line {line}: {what}", path.display()));
        let t = parse_timestamp(&rec[0]).ok_or_else(|| bad("unreadable timestamp"))?;
        let p: f64 = rec[1].parse().map_err(|_| bad("unreadable power"))?;
        samples.push((t, p));
        lines.push(line);
    }
    if samples.iter().all(|s| s.1 <= 0.0) {
        for s in &mut samples {
            s.1 = -s.1;
        }
    }
    resample_to_minutes(&samples).map_err(|e| {
        use evstation_core::scenario::PvSeriesError as E;
        let row = match e {
            E::UnsupportedCadence { row, .. } | E::NonUniform { row } | E::BadPower { row } => {
                Some(row)
            }
            E::Empty => None,
        };
        match row {
            Some(r) => Error::Scenario(format!("{} line {}: {e}", path.display(), lines[r])),
            None => Error::Scenario(format!("{}: {e}", path.display())),
        }
    })
}

/// Column value in `runs.csv`.
pub enum Field {
    Int(u32),
    Float(f64),
}

impl Field {
    pub fn as_f64(&self) -> f64 {
        match *self {
            Field::Int(v) => f64::from(v),
            Field::Float(v) => v,
        }
    }
}

impl std::fmt::Display for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Field::Int(v) => write!(f, "{v}"),
            Field::Float(v) => write!(f, "{v}"),
        }
    }
}

pub type Accessor = fn(&RunResult) -> Field;

/// Every per-run column, in output order.
pub const RESULT_FIELDS: &[(&str, Accessor)] = &[
    ("success_rate", |r| Field::Float(r.success_rate)),
    ("n_sessions", |r| Field::Int(r.n_sessions)),
    ("n_success", |r| Field::Int(r.n_success)),
    ("n_incomplete", |r| Field::Int(r.n_incomplete)),
    ("n_blocked", |r| Field::Int(r.n_blocked)),
    ("n_truncated", |r| Field::Int(r.n_truncated)),
    ("self_sufficiency", |r| Field::Float(r.self_sufficiency)),
    ("fec", |r| Field::Float(r.fec)),
    ("fec_per_day", |r| Field::Float(r.fec_per_day)),
    ("mean_soe", |r| Field::Float(r.mean_soe)),
    ("e_import", |r| Field::Float(r.e_import)),
    ("e_export", |r| Field::Float(r.e_export)),
    ("e_grid_exchange", |r| Field::Float(r.e_import + r.e_export)),
    ("e_pv", |r| Field::Float(r.e_pv)),
    ("e_pv_curtailed", |r| Field::Float(r.e_pv_curtailed)),
    ("e_ev_delivered", |r| Field::Float(r.e_ev_delivered)),
    ("e_losses", |r| Field::Float(r.e_losses)),
    ("e_aux", |r| Field::Float(r.e_aux)),
    ("energy_residual", |r| Field::Float(r.energy_residual)),
    ("inverter_clip_events", |r| {
        Field::Int(r.inverter_clip_events)
    }),
    ("bms_detach_events", |r| Field::Int(r.bms_detach_events)),
];

/// Looks up a KPI accessor by column name.
pub fn kpi(name: &str) -> Option<Accessor> {
    RESULT_FIELDS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, f)| *f)
}

pub fn create_output(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

/// Writes the per-step trace of one run.
pub fn write_trace(path: &Path, rows: &[TraceRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create_output(path)?);
    let n = rows.first().map_or(0, |r| r.soes.len());
    let mut header = vec!["minute".to_string()];
    header.extend((1..=n).map(|i| format!("soe_{i}")));
    header.extend((1..=n).map(|i| format!("alloc_{i}")));
    header.extend(
        [
            "p_pv",
            "p_pv_curtailed",
            "p_ev1",
            "p_ev2",
            "p_inv",
            "p_aux",
            "p_grid",
        ]
        .map(String::from),
    );
    let err = |e| Error::csv(path, e);
    w.write_record(&header).map_err(err)?;
    for r in rows {
        let f = &r.flows;
        let mut rec = vec![r.minute.to_string()];
        rec.extend(r.soes.iter().map(f64::to_string));
        rec.extend(
            r.allocation
                .iter()
                .map(|c: &ComponentId| c.as_str().to_string()),
        );
        rec.extend(
            [
                f.p_pv,
                f.p_pv_curtailed,
                f.p_ev1,
                f.p_ev2,
                f.p_inv,
                f.p_aux,
                f.p_grid,
            ]
            .map(|v| v.to_string()),
        );
        w.write_record(&rec).map_err(err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create_output(path)?;
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    writeln!(w)
        .and_then(|()| w.flush())
        .map_err(|e| Error::io(path, e))
}
