//! CSV and JSON artifacts.
//!
//! Per-iteration CSV columns are `solver,seed,t,f_x,f_y,grad_norm,c_t,m_t,L_t,restarted`
//! and aggregated CSV columns are `solver,t,mean,min,max`. Missing optional
//! values are empty cells in CSV and `null` in JSON.

use crate::error::{Error, Result};
use crate::experiment::{AggregatedSeries, ExperimentResult, Metric};
use nagfree_core::Trace;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const TRACE_HEADER: &str = "solver,seed,t,f_x,f_y,grad_norm,c_t,m_t,L_t,restarted";
pub const SERIES_HEADER: &str = "solver,t,mean,min,max";

pub const TRACES_FILE: &str = "traces.csv";
pub const SERIES_FILE: &str = "series.csv";
pub const RESULT_FILE: &str = "result.json";

#[derive(Serialize)]
struct TraceRow<'a> {
    solver: &'a str,
    seed: u64,
    t: usize,
    f_x: f64,
    f_y: f64,
    grad_norm: f64,
    c_t: Option<f64>,
    m_t: Option<f64>,
    #[serde(rename = "L_t")]
    l_t: Option<f64>,
    restarted: bool,
}

#[derive(Serialize, Deserialize)]
struct SeriesRow {
    solver: String,
    t: usize,
    mean: f64,
    min: f64,
    max: f64,
}

fn csv_bytes<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("in-memory CSV write");
    }
    w.into_inner().expect("in-memory CSV flush")
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Per-iteration rows for every trace, header included.
pub fn traces_csv(traces: &[Trace]) -> String {
    let rows = traces.iter().flat_map(|tr| {
        tr.records.iter().map(move |r| TraceRow {
            solver: &tr.solver_id,
            seed: tr.seed,
            t: r.t,
            f_x: r.f_x,
            f_y: r.f_y,
            grad_norm: r.grad_norm,
            c_t: r.c_t,
            m_t: r.m_t,
            l_t: r.l_t,
            restarted: r.restarted,
        })
    });
    let bytes = csv_bytes(rows);
    if bytes.is_empty() {
        return format!("{TRACE_HEADER}\n");
    }
    String::from_utf8(bytes).expect("CSV is UTF-8")
}

pub fn series_csv(series: &[AggregatedSeries]) -> String {
    let rows = series.iter().flat_map(|s| {
        (0..s.len()).map(move |t| SeriesRow {
            solver: s.solver_id.clone(),
            t,
            mean: s.mean[t],
            min: s.min[t],
            max: s.max[t],
        })
    });
    let bytes = csv_bytes(rows);
    if bytes.is_empty() {
        return format!("{SERIES_HEADER}\n");
    }
    String::from_utf8(bytes).expect("CSV is UTF-8")
}

pub fn write_traces_csv(traces: &[Trace], path: &Path) -> Result<()> {
    write_file(path, traces_csv(traces).as_bytes())
}

pub fn write_series_csv(series: &[AggregatedSeries], path: &Path) -> Result<()> {
    write_file(path, series_csv(series).as_bytes())
}

/// Reads an aggregated CSV back. The metric is not stored in CSV, so it comes
/// back as [`Metric::Value`]; seed counts come back as zero.
pub fn read_series_csv(path: &Path) -> Result<Vec<AggregatedSeries>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::format(path, e))?;
    let header = rdr
        .headers()
        .map_err(|e| Error::format(path, e))?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if header != SERIES_HEADER {
        return Err(Error::format(
            path,
            format!("expected header {SERIES_HEADER:?}, found {header:?}"),
        ));
    }
    let mut out: Vec<AggregatedSeries> = Vec::new();
    for row in rdr.deserialize::<SeriesRow>() {
        let row = row.map_err(|e| Error::format(path, e))?;
        let series = match out.iter_mut().position(|s| s.solver_id == row.solver) {
            Some(i) => &mut out[i],
            None => {
                out.push(AggregatedSeries {
                    solver_id: row.solver.clone(),
                    metric: Metric::Value,
                    mean: vec![],
                    min: vec![],
                    max: vec![],
                    seed_count: 0,
                });
                out.last_mut().expect("just pushed")
            }
        };
        if row.t != series.len() {
            return Err(Error::format(
                path,
                format!("{}: expected t = {}, found {}", row.solver, series.len(), row.t),
            ));
        }
        series.mean.push(row.mean);
        series.min.push(row.min);
        series.max.push(row.max);
    }
    Ok(out)
}

pub fn write_json(result: &ExperimentResult, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(result).map_err(|e| Error::format(path, e))?;
    write_file(path, text.as_bytes())
}

pub fn read_json(path: &Path) -> Result<ExperimentResult> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::format(path, e))
}

/// Writes the trace CSV, aggregated CSV and full JSON into `dir`, returning the paths.
pub fn write_all(result: &ExperimentResult, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let paths = vec![dir.join(TRACES_FILE), dir.join(SERIES_FILE), dir.join(RESULT_FILE)];
    write_traces_csv(&result.traces, &paths[0])?;
    write_series_csv(&result.series, &paths[1])?;
    write_json(result, &paths[2])?;
    Ok(paths)
}

/// Loads aggregated series from either an aggregated CSV or a result JSON,
/// chosen by extension.
pub fn read_series(path: &Path) -> Result<Vec<AggregatedSeries>> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => Ok(read_json(path)?.series),
        Some("csv") => read_series_csv(path),
        _ => Err(Error::Config(format!(
            "{}: expected a .csv or .json file",
            path.display()
        ))),
    }
}
